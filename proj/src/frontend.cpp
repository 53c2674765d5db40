#include "uwb/frontend.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace uwb {

namespace {

Eigen::Index window_count(double ti, double dt) {
    return static_cast<Eigen::Index>(std::llround(ti / dt));
}

// Copies w into an n-sample window, truncating or zero-padding at the end.
Eigen::ArrayXd windowed(const SampledWaveform& w, Eigen::Index n) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    const Eigen::Index take = std::min(n, w.samples.size());
    out.head(take) = w.samples.head(take);
    return out;
}

}  // namespace

SampledWaveform noiseless_frame(const Eigen::Vector2i& d_col,
                                const SampledWaveform& g1,
                                const SampledWaveform& g2, double eb,
                                double ti) {
    if (std::abs(d_col[0]) != 1 || std::abs(d_col[1]) != 1)
        throw std::invalid_argument("noiseless_frame: entries must be +/-1");
    const double dt = g1.dt > 0.0 ? g1.dt : g2.dt;
    const Eigen::Index n = window_count(ti, dt);
    const double amp = std::sqrt(eb / 2.0);

    SampledWaveform frame;
    frame.dt = dt;
    frame.t0 = 0.0;
    frame.samples = amp * (static_cast<double>(d_col[0]) * windowed(g1, n) +
                           static_cast<double>(d_col[1]) * windowed(g2, n));
    return frame;
}

SampledWaveform add_noise(const SampledWaveform& frame, double n0,
                          RngStream& rng) {
    if (n0 < 0.0) throw std::invalid_argument("add_noise: n0 must be >= 0");
    SampledWaveform out = frame;
    if (n0 == 0.0) return out;
    const double sigma = std::sqrt(n0 * 0.5 / frame.dt);  // n0*fs/2
    for (Eigen::Index i = 0; i < out.samples.size(); ++i)
        out.samples[i] += sigma * rng.gaussian();
    return out;
}

double correlate(const SampledWaveform& a, const SampledWaveform& b,
                 double ti) {
    if (a.dt != b.dt)
        throw std::invalid_argument("correlate: mismatched sample spacing");
    const Eigen::Index n = window_count(ti, a.dt);
    if (a.samples.size() < n || b.samples.size() < n)
        throw std::invalid_argument("correlate: windows do not cover [0, ti)");
    return pairwise_dot(a.samples.data(), b.samples.data(), n) * a.dt;
}

FrameSet synth_frames(std::span<const SymbolMatrix> symbols,
                      std::span<const SampledWaveform> responses,
                      const SimConfig& cfg, RngStream* noise) {
    if (responses.size() != static_cast<size_t>(cfg.nr * cfg.nt))
        throw std::invalid_argument("synth_frames: need nr*nt responses");
    const Eigen::Index n = cfg.window_samples();
    const Eigen::Index frames = 2 * static_cast<Eigen::Index>(symbols.size());
    const double amp = std::sqrt(cfg.eb / 2.0);
    const double noise_sigma =
        cfg.n0 > 0.0 ? std::sqrt(cfg.n0 * cfg.fs / 2.0) : 0.0;

    FrameSet set;
    set.dt = cfg.dt();
    set.rx.resize(cfg.nr);
    for (int q = 1; q <= cfg.nr; ++q) {
        Eigen::MatrixXd& rxq = set.rx[q - 1];
        rxq.resize(n, frames);
        Eigen::ArrayXd g1 = windowed(responses[(q - 1) * cfg.nt + 0], n);
        Eigen::ArrayXd g2 = windowed(responses[(q - 1) * cfg.nt + 1], n);
        for (size_t s = 0; s < symbols.size(); ++s) {
            const Eigen::Matrix2i& d = symbols[s].d;
            for (int col = 0; col < 2; ++col) {
                const Eigen::Index j = 2 * static_cast<Eigen::Index>(s) + col;
                rxq.col(j).array() =
                    amp * (static_cast<double>(d(0, col)) * g1 +
                           static_cast<double>(d(1, col)) * g2);
            }
        }
        if (noise != nullptr && noise_sigma > 0.0) {
            for (Eigen::Index j = 0; j < frames; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    rxq(i, j) += noise_sigma * noise->gaussian();
        }
    }
    return set;
}

namespace {

double frame_dot(const FrameSet& frames, int q, Eigen::Index ja,
                 Eigen::Index jb) {
    const Eigen::MatrixXd& rxq = frames.rx[q - 1];
    if (ja < 0 || jb < 0 || ja >= rxq.cols() || jb >= rxq.cols())
        throw std::out_of_range("correlation: missing frame index");
    return pairwise_dot(rxq.col(ja).data(), rxq.col(jb).data(), rxq.rows()) *
           frames.dt;
}

}  // namespace

Eigen::Matrix2d correlation_matrix(const FrameSet& frames, int q, int k,
                                   int y) {
    if (q < 1 || q > frames.nr())
        throw std::out_of_range("correlation_matrix: bad antenna index");
    Eigen::Matrix2d r;
    for (int u = 1; u <= 2; ++u)
        for (int z = 1; z <= 2; ++z)
            r(u - 1, z - 1) = frame_dot(frames, q, 2 * k + u - 1, 2 * y + z - 1);
    return r;
}

Eigen::Matrix2d correlation_sum(const FrameSet& frames, int k, int y) {
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (int q = 1; q <= frames.nr(); ++q)
        sum += correlation_matrix(frames, q, k, y);
    return sum;
}

CorrelationSet::CorrelationSet(int m, int nr) : m_(m), nr_(nr) {
    if (m < 2) throw std::invalid_argument("CorrelationSet: m must be >= 2");
    if (nr < 1) throw std::invalid_argument("CorrelationSet: nr must be >= 1");
    mats_.assign(static_cast<size_t>(m * (m - 1) / 2) * nr,
                 Eigen::Matrix2d::Zero());
}

int CorrelationSet::pair_index(int k, int y) const {
    if (k < 1 || k >= m_ || y < 0 || y >= k)
        throw std::out_of_range("CorrelationSet: pair (k,y) outside window");
    return k * (k - 1) / 2 + y;
}

Eigen::Matrix2d& CorrelationSet::at(int q, int k, int y) {
    if (q < 1 || q > nr_)
        throw std::out_of_range("CorrelationSet: bad antenna index");
    return mats_[static_cast<size_t>(pair_index(k, y)) * nr_ + (q - 1)];
}

const Eigen::Matrix2d& CorrelationSet::at(int q, int k, int y) const {
    if (q < 1 || q > nr_)
        throw std::out_of_range("CorrelationSet: bad antenna index");
    return mats_[static_cast<size_t>(pair_index(k, y)) * nr_ + (q - 1)];
}

Eigen::Matrix2d CorrelationSet::sum_over_q(int k, int y) const {
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (int q = 1; q <= nr_; ++q) sum += at(q, k, y);
    return sum;
}

CorrelationSet correlation_block(const FrameSet& frames, int first_symbol,
                                 int m) {
    CorrelationSet rset(m, frames.nr());
    for (int k = 1; k < m; ++k)
        for (int y = 0; y < k; ++y)
            for (int q = 1; q <= frames.nr(); ++q)
                rset.at(q, k, y) = correlation_matrix(
                    frames, q, first_symbol + k, first_symbol + y);
    return rset;
}

NoiseComponents decompose_components(const SampledWaveform& sig_k,
                                     const SampledWaveform& sig_y,
                                     const SampledWaveform& noise_k,
                                     const SampledWaveform& noise_y,
                                     double ti) {
    NoiseComponents c;
    c.a1 = correlate(sig_k, noise_y, ti);
    c.a2 = correlate(sig_y, noise_k, ti);
    c.a3 = correlate(noise_k, noise_y, ti);
    return c;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRecord> records) {
    os << "trial,q,k,y,u,z,value\n";
    char line[128];
    for (const TraceRecord& r : records) {
        std::snprintf(line, sizeof(line), "%lld,%d,%d,%d,%d,%d,%.17g\n",
                      r.trial, r.q, r.k, r.y, r.u, r.z, r.value);
        os << line;
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& is) {
    std::vector<TraceRecord> out;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("trace csv: empty input");
    if (line.rfind("trial,", 0) != 0)
        throw std::runtime_error("trace csv: bad header: " + line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        TraceRecord r;
        if (std::sscanf(line.c_str(), "%lld,%d,%d,%d,%d,%d,%lg", &r.trial, &r.q,
                        &r.k, &r.y, &r.u, &r.z, &r.value) != 7)
            throw std::runtime_error("trace csv: bad row: " + line);
        out.push_back(r);
    }
    return out;
}

std::vector<TraceRecord> trace_records(const CorrelationSet& rset,
                                       long long trial) {
    std::vector<TraceRecord> out;
    for (int k = 1; k < rset.window_m(); ++k)
        for (int y = 0; y < k; ++y)
            for (int q = 1; q <= rset.nr(); ++q)
                for (int u = 1; u <= 2; ++u)
                    for (int z = 1; z <= 2; ++z)
                        out.push_back({trial, q, k, y, u, z,
                                       rset.at(q, k, y)(u - 1, z - 1)});
    return out;
}

std::vector<std::pair<long long, CorrelationSet>> correlation_sets_from_traces(
    std::span<const TraceRecord> records, int m, int nr) {
    std::map<long long, CorrelationSet> by_trial;
    for (const TraceRecord& r : records) {
        auto it = by_trial.find(r.trial);
        if (it == by_trial.end())
            it = by_trial.emplace(r.trial, CorrelationSet(m, nr)).first;
        it->second.at(r.q, r.k, r.y)(r.u - 1, r.z - 1) = r.value;
    }
    std::vector<std::pair<long long, CorrelationSet>> out;
    out.reserve(by_trial.size());
    for (auto& [trial, rset] : by_trial)
        out.emplace_back(trial, std::move(rset));
    return out;
}

}  // namespace uwb
