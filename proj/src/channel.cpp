#include "uwb/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace uwb {

void ChannelParams::validate(double tf) const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("ChannelParams: " + what);
    };
    if (!(cluster_rate > 0.0)) fail("cluster_rate must be > 0");
    if (!(ray_rate > 0.0)) fail("ray_rate must be > 0");
    if (!(cluster_decay > 0.0)) fail("cluster_decay must be > 0");
    if (!(ray_decay > 0.0)) fail("ray_decay must be > 0");
    if (!(sigma1_db >= 0.0 && sigma2_db >= 0.0)) fail("sigmas must be >= 0");
    if (!(tg > 0.0)) fail("tg must be > 0");
    if (tg > tf) fail("tg must be <= tf (no-ISI condition)");
}

const std::vector<Tap>& ChannelRealization::taps(int q, int p) const {
    if (q < 1 || q > nr_ || p < 1 || p > nt_)
        throw std::out_of_range("ChannelRealization: bad antenna index");
    return taps_[(q - 1) * nt_ + (p - 1)];
}

std::vector<Tap>& ChannelRealization::taps(int q, int p) {
    if (q < 1 || q > nr_ || p < 1 || p > nt_)
        throw std::out_of_range("ChannelRealization: bad antenna index");
    return taps_[(q - 1) * nt_ + (p - 1)];
}

SampledWaveform gaussian_doublet(double tw, double fs) {
    if (fs * tw < 8.0)
        throw std::invalid_argument("gaussian_doublet: fs*tw must be >= 8");
    const Eigen::Index n = static_cast<Eigen::Index>(std::llround(tw * fs));
    const double dt = 1.0 / fs;
    // sigma = tw/8 puts the support endpoints at ~0.5% of the peak.
    const double sigma = tw / 8.0;

    SampledWaveform w;
    w.samples.resize(n);
    w.dt = dt;
    w.t0 = 0.0;
    // Midpoint samples; the right half mirrors the left so the sequence is
    // exactly even about tw/2.
    for (Eigen::Index i = 0; i < (n + 1) / 2; ++i) {
        const double u = ((static_cast<double>(i) + 0.5) -
                          static_cast<double>(n) / 2.0) *
                         dt / sigma;
        const double v = (1.0 - u * u) * std::exp(-0.5 * u * u);
        w.samples[i] = v;
        w.samples[n - 1 - i] = v;
    }
    w.samples -= w.samples.mean();  // zero DC on the sample grid
    w.samples /= std::sqrt(energy(w));
    return w;
}

namespace {

std::atomic<std::uint64_t>& dropped_warnings() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

struct RawTap {
    double delay_ns;
    double gain;
};

// One SV draw for a single antenna pair, delays in ns, gains unscaled.
// Arrivals are generated past the tg cap (five decay constants further, by
// which point the mean-square profile is down to e^-5) so the energy the cap
// discards can be accounted per realization.
std::vector<RawTap> draw_sv_taps(const ChannelParams& prm, RngStream& rng) {
    const double tg_ns = prm.tg * 1e9;
    const double horizon_ns =
        tg_ns + 5.0 * std::max(prm.cluster_decay, prm.ray_decay);
    const double sigma_x =
        std::sqrt(prm.sigma1_db * prm.sigma1_db + prm.sigma2_db * prm.sigma2_db);
    const double ln10 = std::log(10.0);

    std::vector<RawTap> taps;
    double t_cluster = 0.0;  // first cluster at the origin
    while (t_cluster < horizon_ns) {
        double t_ray = 0.0;  // first ray at the cluster start
        while (t_cluster + t_ray < horizon_ns) {
            // E[gain^2] = exp(-T/Gamma) * exp(-tau/gamma), realized through a
            // lognormal amplitude with matching second moment.
            const double mean_db = (-10.0 * t_cluster / prm.cluster_decay -
                                    10.0 * t_ray / prm.ray_decay) /
                                       ln10 -
                                   sigma_x * sigma_x * ln10 / 20.0;
            const double x_db = mean_db + sigma_x * rng.gaussian();
            const double amp = std::pow(10.0, x_db / 20.0);
            taps.push_back({t_cluster + t_ray, amp * rng.sign()});
            t_ray += rng.exponential(prm.ray_rate);
        }
        t_cluster += rng.exponential(prm.cluster_rate);
    }
    return taps;
}

}  // namespace

ChannelRealization draw_channel(const ChannelParams& params, int nr, int nt,
                                RngStream& rng) {
    ChannelRealization ch(nr, nt);
    double total_kept = 0.0;
    double total_dropped = 0.0;
    for (int q = 1; q <= nr; ++q) {
        for (int p = 1; p <= nt; ++p) {
            std::vector<RawTap> raw = draw_sv_taps(params, rng);
            std::sort(raw.begin(), raw.end(),
                      [](const RawTap& a, const RawTap& b) {
                          return a.delay_ns < b.delay_ns;
                      });
            auto& taps = ch.taps(q, p);
            taps.reserve(raw.size());
            double kept = 0.0;
            for (const RawTap& t : raw) {
                const double e = t.gain * t.gain;
                if (t.delay_ns * 1e-9 < params.tg) {
                    taps.push_back({t.delay_ns * 1e-9, t.gain});
                    kept += e;
                } else {
                    total_dropped += e;  // generated past the cap
                }
            }
            total_kept += kept;
            // Unit tap energy per antenna pair.
            if (params.normalize_energy && kept > 0.0) {
                const double scale = 1.0 / std::sqrt(kept);
                for (Tap& t : taps) t.gain *= scale;
            }
        }
    }
    const double total = total_kept + total_dropped;
    ch.dropped_energy_fraction = total > 0.0 ? total_dropped / total : 0.0;
    if (ch.dropped_energy_fraction > 0.01) ++dropped_warnings();
    return ch;
}

std::uint64_t dropped_energy_warning_count() { return dropped_warnings(); }

SampledWaveform overall_response(const ChannelRealization& ch,
                                 const SampledWaveform& pulse, int q, int p) {
    const auto& taps = ch.taps(q, p);
    const double dt = pulse.dt;
    double max_delay = 0.0;
    for (const Tap& t : taps) max_delay = std::max(max_delay, t.delay);

    SampledWaveform g;
    g.dt = dt;
    g.t0 = 0.0;
    const Eigen::Index n =
        static_cast<Eigen::Index>(std::llround(max_delay / dt)) + pulse.size();
    g.samples = Eigen::ArrayXd::Zero(std::max<Eigen::Index>(n, pulse.size()));
    for (const Tap& t : taps) {
        const Eigen::Index off =
            static_cast<Eigen::Index>(std::llround(t.delay / dt));
        g.samples.segment(off, pulse.size()) += t.gain * pulse.samples;
    }
    return g;
}

double captured_energy(const SampledWaveform& g, double ti) {
    if (!(ti > 0.0)) throw std::invalid_argument("captured_energy: ti must be > 0");
    return energy(g, ti);
}

void write_taps(std::ostream& os, const ChannelRealization& ch) {
    char line[96];
    for (int q = 1; q <= ch.nr(); ++q) {
        for (int p = 1; p <= ch.nt(); ++p) {
            for (const Tap& t : ch.taps(q, p)) {
                std::snprintf(line, sizeof(line), "%d %d %.17g %.17g\n", q, p,
                              t.delay * 1e9, t.gain);
                os << line;
            }
        }
    }
}

ChannelRealization read_taps(std::istream& is, int nr, int nt) {
    ChannelRealization ch(nr, nt);
    int q;
    int p;
    double delay_ns;
    double gain;
    while (is >> q >> p >> delay_ns >> gain) {
        ch.taps(q, p).push_back({delay_ns * 1e-9, gain});
    }
    for (int q2 = 1; q2 <= nr; ++q2)
        for (int p2 = 1; p2 <= nt; ++p2) {
            auto& taps = ch.taps(q2, p2);
            std::sort(taps.begin(), taps.end(),
                      [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
        }
    return ch;
}

}  // namespace uwb
