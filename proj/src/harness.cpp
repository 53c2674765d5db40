#include "uwb/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace uwb {

namespace {

using json = nlohmann::json;

int detector_rank(DetectorKind k) { return static_cast<int>(k); }

double wilson_free_ci95(double ber, long long bits) {
    if (bits <= 0) return 0.0;
    return 1.96 * std::sqrt(std::max(0.0, ber * (1.0 - ber)) /
                            static_cast<double>(bits));
}

std::vector<SampledWaveform> make_responses(const ChannelRealization& ch,
                                            const SampledWaveform& pulse) {
    std::vector<SampledWaveform> responses;
    responses.reserve(ch.nr() * ch.nt());
    for (int q = 1; q <= ch.nr(); ++q)
        for (int p = 1; p <= ch.nt(); ++p)
            responses.push_back(overall_response(ch, pulse, q, p));
    return responses;
}

std::vector<Codeword> draw_info(int count, RngStream& data) {
    std::vector<Codeword> info;
    info.reserve(count);
    for (int i = 0; i < count; ++i) {
        const std::uint32_t b = data.bit_pair();
        info.push_back(codeword_from_bits(
            BitPair{static_cast<int>(b >> 1), static_cast<int>(b & 1)}));
    }
    return info;
}

std::vector<Codeword> detect_block(const FrameSet& frames, DetectorKind det,
                                   int m, int block_len,
                                   std::span<const Codeword> truth) {
    std::vector<Codeword> decided;
    decided.reserve(block_len);
    switch (det) {
        case DetectorKind::DD: {
            for (int k = 1; k <= block_len; ++k)
                decided.push_back(dd_detect(correlation_sum(frames, k, k - 1)));
            break;
        }
        case DetectorKind::MSD: {
            int s0 = 0;
            while (s0 < block_len) {
                const int mw = std::min(m, block_len - s0 + 1);
                const CorrelationSet rset = correlation_block(frames, s0, mw);
                for (const Codeword& u : msd_detect(rset)) decided.push_back(u);
                s0 += mw - 1;
            }
            break;
        }
        case DetectorKind::DFMSD:
        case DetectorKind::GENIE_DFMSD: {
            const bool genie = det == DetectorKind::GENIE_DFMSD;
            std::vector<Eigen::Matrix2d> rbar;
            std::vector<Codeword> feedback;
            for (int k = 1; k <= block_len; ++k) {
                const int n_y = std::min(m - 1, k);
                rbar.clear();
                feedback.clear();
                for (int y = k - n_y; y < k; ++y)
                    rbar.push_back(correlation_sum(frames, k, y));
                // Fed-back codewords U_{y+1}..U_{k-1}; truth in genie mode.
                for (int v = k - n_y + 1; v < k; ++v)
                    feedback.push_back(genie ? truth[v - 1] : decided[v - 1]);
                decided.push_back(dfmsd_detect(rbar, feedback));
            }
            break;
        }
    }
    return decided;
}

}  // namespace

BlockResult run_block(const SimConfig& cfg, const ChannelParams& params,
                      DetectorKind detector, std::uint64_t seed_base,
                      std::uint64_t block_index,
                      std::vector<Codeword>* decisions,
                      std::vector<Codeword>* truth_out) {
    cfg.validate();
    params.validate(cfg.tf);
    if (cfg.block_len < cfg.m)
        throw std::invalid_argument("run_block: block_len must be >= m");

    RngStream rng_ch = derive_stream(seed_base, "channel", block_index);
    RngStream rng_data = derive_stream(seed_base, "data", block_index);
    RngStream rng_noise = derive_stream(seed_base, "noise", block_index);

    const ChannelRealization ch = draw_channel(params, cfg.nr, cfg.nt, rng_ch);
    const SampledWaveform pulse = gaussian_doublet(cfg.tw, cfg.fs);
    const std::vector<SampledWaveform> responses = make_responses(ch, pulse);

    const std::vector<Codeword> info = draw_info(cfg.block_len, rng_data);
    const std::vector<SymbolMatrix> symbols = differential_encode(info);
    const FrameSet frames = synth_frames(symbols, responses, cfg, &rng_noise);

    const std::vector<Codeword> decided =
        detect_block(frames, detector, cfg.m, cfg.block_len, info);

    BlockResult res;
    res.bits = 2LL * cfg.block_len;
    for (int k = 0; k < cfg.block_len; ++k)
        res.errors += bit_distance(info[k], decided[k]);
    if (decisions != nullptr) *decisions = decided;
    if (truth_out != nullptr) *truth_out = info;
    return res;
}

void SweepSpec::validate() const {
    if (ebn0_db.empty()) throw std::invalid_argument("SweepSpec: empty Eb/N0 grid");
    if (detectors.empty()) throw std::invalid_argument("SweepSpec: no detectors");
    if (m_list.empty()) throw std::invalid_argument("SweepSpec: empty M list");
    if (min_errors < 1) throw std::invalid_argument("SweepSpec: min_errors >= 1");
    if (max_bits < 2) throw std::invalid_argument("SweepSpec: max_bits >= 2");
    for (int m : m_list)
        if (m < 2) throw std::invalid_argument("SweepSpec: every M must be >= 2");
}

namespace {

struct GridPoint {
    DetectorKind detector;
    int m;
    double ebn0_db;
};

// Canonical point order (detector, M, ebn0 ascending); DD ignores the M list.
std::vector<GridPoint> make_grid(const SweepSpec& spec) {
    std::vector<DetectorKind> dets = spec.detectors;
    std::sort(dets.begin(), dets.end(),
              [](DetectorKind a, DetectorKind b) {
                  return detector_rank(a) < detector_rank(b);
              });
    dets.erase(std::unique(dets.begin(), dets.end()), dets.end());
    std::vector<int> ms = spec.m_list;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<double> grid = spec.ebn0_db;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<GridPoint> points;
    for (DetectorKind det : dets) {
        const std::vector<int> ms_for_det =
            det == DetectorKind::DD ? std::vector<int>{2} : ms;
        for (int m : ms_for_det)
            for (double e : grid) points.push_back({det, m, e});
    }
    return points;
}

constexpr int kWaveBlocks = 32;

BerPoint run_point(const GridPoint& pt, SimConfig cfg,
                   const ChannelParams& params, const SweepSpec& spec,
                   std::uint64_t seed_base, int workers) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.eb = std::pow(10.0, pt.ebn0_db / 10.0);
    cfg.n0 = 1.0;
    cfg.m = pt.m;
    cfg.block_len = std::max(spec.block_len, pt.m);
    cfg.seed = spec.seed;

    BerPoint out;
    out.detector = pt.detector;
    out.m = pt.m;
    out.ebn0_db = pt.ebn0_db;

    std::uint64_t next_block = 0;
    bool done = false;
    std::vector<BlockResult> wave(kWaveBlocks);
    while (!done) {
        // Workers race over the wave's block indices; the stopping rule only
        // looks at results in block order after the join, so the outcome is
        // identical for any worker count.
        std::atomic<int> cursor{0};
        auto work = [&]() {
            for (;;) {
                const int w = cursor.fetch_add(1);
                if (w >= kWaveBlocks) return;
                wave[w] = run_block(cfg, params, pt.detector, seed_base,
                                    next_block + static_cast<std::uint64_t>(w));
            }
        };
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            const int n_threads = std::min(workers, kWaveBlocks);
            pool.reserve(n_threads);
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
        for (const BlockResult& r : wave) {
            out.bits += r.bits;
            out.errors += r.errors;
            if (out.errors >= spec.min_errors || out.bits >= spec.max_bits) {
                done = true;
                break;
            }
        }
        next_block += kWaveBlocks;
    }
    out.ber = out.bits > 0
                  ? static_cast<double>(out.errors) / static_cast<double>(out.bits)
                  : 0.0;
    out.ci95 = wilson_free_ci95(out.ber, out.bits);
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return out;
}

}  // namespace

std::vector<BerPoint> run_sweep(const SweepSpec& spec, SimConfig cfg,
                                const ChannelParams& params) {
    spec.validate();
    const int workers = spec.workers > 0
                            ? spec.workers
                            : static_cast<int>(std::max(
                                  1u, std::thread::hardware_concurrency()));
    const std::vector<GridPoint> points = make_grid(spec);
    std::vector<BerPoint> out;
    out.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        const std::uint64_t seed_base =
            derive_stream(spec.seed, "point", i).next_u64();
        out.push_back(run_point(points[i], cfg, params, spec, seed_base, workers));
    }
    return out;
}

std::vector<BerPoint> theory_sweep(const SweepSpec& spec, SimConfig cfg,
                                   const ChannelParams& params,
                                   int n_channels) {
    if (spec.ebn0_db.empty())
        throw std::invalid_argument("theory_sweep: empty Eb/N0 grid");
    if (spec.m_list.empty())
        throw std::invalid_argument("theory_sweep: empty M list");
    if (n_channels < 1)
        throw std::invalid_argument("theory_sweep: n_channels must be >= 1");
    std::vector<int> ms = spec.m_list;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<double> grid = spec.ebn0_db;
    std::sort(grid.begin(), grid.end());

    std::vector<BerPoint> out;
    std::uint64_t ordinal = 0;
    for (int m : ms) {
        for (double e : grid) {
            cfg.m = m;
            cfg.eb = std::pow(10.0, e / 10.0);
            cfg.n0 = 1.0;
            RngStream rng = derive_stream(spec.seed, "theory", ordinal++);
            const auto t_start = std::chrono::steady_clock::now();
            const TheoryBerPoint tp = average_ber(cfg, params, n_channels, rng);
            BerPoint point;
            point.source = "theory";
            point.detector = DetectorKind::GENIE_DFMSD;
            point.m = m;
            point.ebn0_db = e;
            point.bits = tp.n_channels;
            point.errors = 0;
            point.ber = tp.ber;
            point.ci95 = 1.96 * tp.mc_std_error;
            point.wall_seconds = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t_start)
                                     .count();
            out.push_back(point);
        }
    }
    return out;
}

void emit_csv(std::ostream& os, std::vector<BerPoint> points,
              bool include_timing) {
    std::sort(points.begin(), points.end(),
              [](const BerPoint& a, const BerPoint& b) {
                  if (a.source != b.source) return a.source < b.source;
                  if (a.detector != b.detector)
                      return detector_rank(a.detector) < detector_rank(b.detector);
                  if (a.m != b.m) return a.m < b.m;
                  return a.ebn0_db < b.ebn0_db;
              });
    os << "source,detector,M,ebn0_db,bits,errors,ber,ci95,seconds\n";
    char line[256];
    for (const BerPoint& p : points) {
        std::snprintf(line, sizeof(line), "%s,%s,%d,%.6g,%lld,%lld,%.9g,%.9g,%.3f\n",
                      p.source.c_str(), std::string(to_string(p.detector)).c_str(),
                      p.m, p.ebn0_db, p.bits, p.errors, p.ber, p.ci95,
                      include_timing ? p.wall_seconds : 0.0);
        os << line;
    }
    if (!os) throw std::runtime_error("emit_csv: write failure");
}

std::vector<TraceRecord> trace_block(const SimConfig& cfg,
                                     const ChannelParams& params,
                                     std::uint64_t seed_base, int n_trials) {
    cfg.validate();
    params.validate(cfg.tf);
    std::vector<TraceRecord> records;
    for (int trial = 0; trial < n_trials; ++trial) {
        RngStream rng_ch = derive_stream(seed_base, "channel", trial);
        RngStream rng_data = derive_stream(seed_base, "data", trial);
        RngStream rng_noise = derive_stream(seed_base, "noise", trial);
        const ChannelRealization ch =
            draw_channel(params, cfg.nr, cfg.nt, rng_ch);
        const SampledWaveform pulse = gaussian_doublet(cfg.tw, cfg.fs);
        const std::vector<SampledWaveform> responses = make_responses(ch, pulse);
        const std::vector<Codeword> info = draw_info(cfg.m - 1, rng_data);
        const std::vector<SymbolMatrix> symbols = differential_encode(info);
        const FrameSet frames = synth_frames(symbols, responses, cfg, &rng_noise);
        const CorrelationSet rset = correlation_block(frames, 0, cfg.m);
        for (const TraceRecord& r : trace_records(rset, trial))
            records.push_back(r);
    }
    return records;
}

std::vector<ReplayDecision> run_replay(std::span<const TraceRecord> records,
                                       DetectorKind detector, int m, int nr) {
    std::vector<ReplayDecision> out;
    for (const auto& [trial, rset] : correlation_sets_from_traces(records, m, nr)) {
        switch (detector) {
            case DetectorKind::DD: {
                out.push_back({trial, 1, dd_detect(rset.sum_over_q(1, 0))});
                break;
            }
            case DetectorKind::MSD: {
                const std::vector<Codeword> seq = msd_detect(rset);
                for (int k = 1; k < m; ++k)
                    out.push_back({trial, k, seq[k - 1]});
                break;
            }
            case DetectorKind::DFMSD:
            case DetectorKind::GENIE_DFMSD: {
                std::vector<Codeword> decided;
                for (int k = 1; k < m; ++k) {
                    std::vector<Eigen::Matrix2d> rbar;
                    std::vector<Codeword> feedback;
                    for (int y = 0; y < k; ++y)
                        rbar.push_back(rset.sum_over_q(k, y));
                    for (int v = 1; v < k; ++v)
                        feedback.push_back(decided[v - 1]);
                    decided.push_back(dfmsd_detect(rbar, feedback));
                    out.push_back({trial, k, decided.back()});
                }
                break;
            }
        }
    }
    return out;
}

void write_decisions_csv(std::ostream& os,
                         std::span<const ReplayDecision> decisions) {
    os << "trial,k,codeword,b1,b2\n";
    char line[96];
    for (const ReplayDecision& d : decisions) {
        const BitPair bits = bits_from_codeword(d.u);
        std::snprintf(line, sizeof(line), "%lld,%d,%d,%d,%d\n", d.trial, d.k,
                      d.u.index(), bits.b1, bits.b2);
        os << line;
    }
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.pass; });
}

namespace {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    long long n = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double variance() const {
        const double nn = static_cast<double>(n);
        return (sum_sq - sum * sum / nn) / (nn - 1.0);
    }
};

ValidationCheck rel_check(const std::string& name, double measured,
                          double expected, double rel_tol) {
    ValidationCheck c{name, measured, expected, rel_tol, false};
    c.pass = std::abs(measured - expected) <= rel_tol * std::abs(expected);
    return c;
}

ValidationCheck sigma_check(const std::string& name, double measured,
                            double std_error, double n_sigmas) {
    ValidationCheck c{name, measured, 0.0, n_sigmas * std_error, false};
    c.pass = std::abs(measured) <= n_sigmas * std_error;
    return c;
}

}  // namespace

ValidationReport run_validation(std::uint64_t seed, int n_draws,
                                int n_identity_draws) {
    SimConfig cfg;
    cfg.eb = 1.0;
    cfg.n0 = 0.02;
    cfg.m = 4;
    cfg.seed = seed;
    cfg.validate();
    ChannelParams params;
    params.validate(cfg.tf);

    const double w = cfg.noise_bandwidth();
    const Eigen::Index n = cfg.window_samples();
    const double dt = cfg.dt();
    const double noise_sigma = std::sqrt(cfg.n0 * cfg.fs / 2.0);
    const double amp = std::sqrt(cfg.eb / 2.0);

    // Fixed channel for the whole suite.
    RngStream rng_ch = derive_stream(seed, "validate-channel", 0);
    const ChannelRealization ch = draw_channel(params, 1, 2, rng_ch);
    const SampledWaveform pulse = gaussian_doublet(cfg.tw, cfg.fs);
    SampledWaveform g1 = overall_response(ch, pulse, 1, 1);
    SampledWaveform g2 = overall_response(ch, pulse, 1, 2);
    const double eps1 = captured_energy(g1, cfg.ti);
    const double eps2 = captured_energy(g2, cfg.ti);
    const double eps = eps1 + eps2;

    Eigen::ArrayXd g1w = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd g2w = Eigen::ArrayXd::Zero(n);
    g1w.head(std::min(n, g1.samples.size())) =
        g1.samples.head(std::min(n, g1.samples.size()));
    g2w.head(std::min(n, g2.samples.size())) =
        g2.samples.head(std::min(n, g2.samples.size()));

    ValidationReport rep;
    rep.eps_total = eps;
    rep.w_bandwidth = w;

    // --- A1/A2/A3 cross-term statistics, data re-drawn per draw so the
    // conditional formulas hold exactly in expectation.
    {
        RngStream rng = derive_stream(seed, "validate-components", 0);
        Moments a1m;
        Moments a2m;
        Moments a3m;
        double c12 = 0.0;
        double c13 = 0.0;
        double c23 = 0.0;
        Eigen::ArrayXd sig_k(n);
        Eigen::ArrayXd sig_y(n);
        Eigen::ArrayXd n_k(n);
        Eigen::ArrayXd n_y(n);
        for (int it = 0; it < n_draws; ++it) {
            const double d1k = rng.sign();
            const double d2k = rng.sign();
            const double d1y = rng.sign();
            const double d2y = rng.sign();
            sig_k = amp * (d1k * g1w + d2k * g2w);
            sig_y = amp * (d1y * g1w + d2y * g2w);
            for (Eigen::Index i = 0; i < n; ++i) n_k[i] = noise_sigma * rng.gaussian();
            for (Eigen::Index i = 0; i < n; ++i) n_y[i] = noise_sigma * rng.gaussian();
            const double a1 = pairwise_dot(sig_k.data(), n_y.data(), n) * dt;
            const double a2 = pairwise_dot(sig_y.data(), n_k.data(), n) * dt;
            const double a3 = pairwise_dot(n_k.data(), n_y.data(), n) * dt;
            a1m.add(a1);
            a2m.add(a2);
            a3m.add(a3);
            c12 += a1 * a2;
            c13 += a1 * a3;
            c23 += a2 * a3;
        }
        const double var_sig_expect = (cfg.eb / 2.0) * (cfg.n0 / 2.0) * eps;
        const double var_nn_expect = (cfg.n0 * cfg.n0 / 2.0) * w * cfg.ti;
        rep.checks.push_back(
            rel_check("var(A1) vs (Eb/2)(N0/2)(eps1+eps2)", a1m.variance(),
                      var_sig_expect, 0.03));
        rep.checks.push_back(
            rel_check("var(A2) vs (Eb/2)(N0/2)(eps1+eps2)", a2m.variance(),
                      var_sig_expect, 0.03));
        rep.checks.push_back(rel_check("var(A3) vs (N0^2/2)*W*Ti",
                                       a3m.variance(), var_nn_expect, 0.03));
        const double nn = static_cast<double>(n_draws);
        rep.checks.push_back(sigma_check(
            "cov(A1,A2) within 3 std errors of 0", c12 / nn,
            std::sqrt(a1m.variance() * a2m.variance() / nn), 3.0));
        rep.checks.push_back(sigma_check(
            "cov(A1,A3) within 3 std errors of 0", c13 / nn,
            std::sqrt(a1m.variance() * a3m.variance() / nn), 3.0));
        rep.checks.push_back(sigma_check(
            "cov(A2,A3) within 3 std errors of 0", c23 / nn,
            std::sqrt(a2m.variance() * a3m.variance() / nn), 3.0));
    }

    // --- Genie metric statistics: U_k = U(1) and correct feedback, random
    // past data, full frame/correlation pipeline. The closed-form variance
    // (M-1)*(Eb*N0*eps + N0^2*W*Ti) is exact only at M=2: for larger windows
    // the current symbol's noise correlates identically against every
    // reference symbol (Tr(V_y A2_y) = sqrt(Eb/2)*Tr(Ck^T Dk) for all y), so
    // that component adds coherently and the exact conditional variance is
    // (M-1)*(M*Eb*N0*eps/2 + N0^2*W*Ti). Both laws are checked, each at the
    // window size where it is exact.
    for (int m : {2, 4}) {
        RngStream rng_data = derive_stream(seed, "validate-psi-data", m);
        RngStream rng_noise = derive_stream(seed, "validate-psi-noise", m);
        std::vector<SampledWaveform> responses;
        responses.push_back(g1);
        responses.push_back(g2);
        Moments psi1m;
        Moments psi2m;
        SimConfig mc_cfg = cfg;
        mc_cfg.m = m;
        for (int it = 0; it < n_draws; ++it) {
            std::vector<Codeword> info;
            for (int v = 1; v < m - 1; ++v) {
                const std::uint32_t b = rng_data.bit_pair();
                info.push_back(codeword_from_bits(
                    BitPair{static_cast<int>(b >> 1), static_cast<int>(b & 1)}));
            }
            info.push_back(Codeword::from_index(1));  // U_k = U(1)
            // Random valid start symbol: D0 times a random codeword.
            std::vector<SymbolMatrix> symbols;
            SymbolMatrix start;
            start.d = reference_symbol().d *
                      Codeword::from_index(1 + static_cast<int>(
                                                   rng_data.next_u64() & 3))
                          .imatrix();
            symbols.push_back(start);
            for (const Codeword& u : info) {
                SymbolMatrix next;
                next.d = symbols.back().d * u.imatrix();
                symbols.push_back(next);
            }
            const FrameSet frames =
                synth_frames(symbols, responses, mc_cfg, &rng_noise);
            const int k = m - 1;
            std::vector<Eigen::Matrix2d> rbar;
            std::vector<Codeword> feedback;
            for (int y = 0; y < k; ++y)
                rbar.push_back(correlation_sum(frames, k, y));
            for (int v = 1; v < k; ++v) feedback.push_back(info[v - 1]);
            MetricSet metrics;
            dfmsd_detect(rbar, feedback, &metrics);
            psi1m.add(metrics.psi1);
            psi2m.add(metrics.psi2);
        }
        const ConditionalStats st = stats_from_energy(eps, mc_cfg, w);
        const double mm1 = static_cast<double>(m - 1);
        const double exact_var =
            mm1 * (m * mc_cfg.eb * mc_cfg.n0 * eps / 2.0 +
                   mc_cfg.n0 * mc_cfg.n0 * w * mc_cfg.ti);
        const std::string tag = " (M=" + std::to_string(m) + ")";
        rep.checks.push_back(rel_check("mean(Psi1) vs Eb*(M-1)*eps" + tag,
                                       psi1m.mean(), st.s, 0.01));
        if (m == 2) {
            rep.checks.push_back(rel_check(
                "var(Psi1) vs (M-1)*(Eb*N0*eps + N0^2*W*Ti)" + tag,
                psi1m.variance(), st.sigma2, 0.03));
            rep.checks.push_back(rel_check(
                "var(Psi2) vs (M-1)*(Eb*N0*eps + N0^2*W*Ti)" + tag,
                psi2m.variance(), st.sigma2, 0.03));
        } else {
            rep.checks.push_back(rel_check(
                "var(Psi1) vs A2-coherent law (M-1)*(M*Eb*N0*eps/2 + N0^2*W*Ti)" +
                    tag,
                psi1m.variance(), exact_var, 0.03));
            rep.checks.push_back(rel_check(
                "var(Psi2) vs A2-coherent law (M-1)*(M*Eb*N0*eps/2 + N0^2*W*Ti)" +
                    tag,
                psi2m.variance(), exact_var, 0.03));
        }
        rep.checks.push_back(sigma_check(
            "mean(Psi2) within 3 std errors of 0" + tag, psi2m.mean(),
            std::sqrt(psi2m.variance() / static_cast<double>(n_draws)), 3.0));
    }

    // --- Metric identities on random correlation sets, against an
    // independent full-matrix-product evaluation.
    {
        RngStream rng = derive_stream(seed, "validate-identity", 0);
        long long psi3_violations = 0;
        long long psi4_violations = 0;
        double max_route_diff = 0.0;
        const int m = 4;
        for (int it = 0; it < n_identity_draws; ++it) {
            std::vector<Eigen::Matrix2d> rbar(m - 1);
            for (auto& r : rbar)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) r(a, b) = rng.gaussian();
            std::vector<Codeword> feedback;
            for (int v = 0; v < m - 2; ++v)
                feedback.push_back(Codeword::from_index(
                    1 + static_cast<int>(rng.next_u64() & 3)));
            // Independent route: psi_m = sum_y Tr(P_y * U(m) * Rbar_y) with
            // literal matrix products.
            double psi[5] = {0, 0, 0, 0, 0};
            for (int mm = 1; mm <= 4; ++mm) {
                const Eigen::Matrix2d um = Codeword::from_index(mm).matrix();
                for (size_t i = 0; i < rbar.size(); ++i) {
                    Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
                    for (size_t v = i; v < feedback.size(); ++v)
                        p = p * feedback[v].matrix();
                    psi[mm] += (p * um * rbar[i]).trace();
                }
            }
            if (psi[3] != -psi[1]) ++psi3_violations;
            if (psi[4] != -psi[2]) ++psi4_violations;
            MetricSet metrics;
            dfmsd_detect(rbar, feedback, &metrics);
            const double scale =
                std::max({1.0, std::abs(psi[1]), std::abs(psi[2])});
            max_route_diff = std::max(
                max_route_diff,
                std::max(std::abs(metrics.psi1 - psi[1]) / scale,
                         std::abs(metrics.psi2 - psi[2]) / scale));
        }
        ValidationCheck c3{"psi3 == -psi1 exactly (random sets)",
                           static_cast<double>(psi3_violations), 0.0, 0.0,
                           psi3_violations == 0};
        ValidationCheck c4{"psi4 == -psi2 exactly (random sets)",
                           static_cast<double>(psi4_violations), 0.0, 0.0,
                           psi4_violations == 0};
        ValidationCheck cr{"two-trace metric route vs full products",
                           max_route_diff, 0.0, 1e-12,
                           max_route_diff <= 1e-12};
        rep.checks.push_back(c3);
        rep.checks.push_back(c4);
        rep.checks.push_back(cr);
    }

    return rep;
}

void print_validation(std::ostream& os, const ValidationReport& report) {
    char line[192];
    std::snprintf(line, sizeof(line),
                  "# fixed channel eps = %.6g, W = %.6g Hz\n", report.eps_total,
                  report.w_bandwidth);
    os << line;
    for (const ValidationCheck& c : report.checks) {
        std::snprintf(line, sizeof(line), "%-52s measured=%-13.6g expected=%-13.6g %s\n",
                      c.name.c_str(), c.measured, c.expected,
                      c.pass ? "PASS" : "FAIL");
        os << line;
    }
    os << (report.all_pass() ? "validation: ALL PASS\n" : "validation: FAIL\n");
}

namespace {

template <typename T>
void assign_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Config parse_config(const std::string& json_text) {
    Config cfg;
    const json j = json::parse(json_text);
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        assign_if(s, "eb", cfg.sim.eb);
        assign_if(s, "n0", cfg.sim.n0);
        assign_if(s, "tf", cfg.sim.tf);
        assign_if(s, "ti", cfg.sim.ti);
        assign_if(s, "tw", cfg.sim.tw);
        assign_if(s, "fs", cfg.sim.fs);
        assign_if(s, "m", cfg.sim.m);
        assign_if(s, "nr", cfg.sim.nr);
        assign_if(s, "nt", cfg.sim.nt);
        assign_if(s, "block_len", cfg.sim.block_len);
        assign_if(s, "seed", cfg.sim.seed);
    }
    if (j.contains("channel")) {
        const json& c = j.at("channel");
        assign_if(c, "cluster_rate", cfg.channel.cluster_rate);
        assign_if(c, "ray_rate", cfg.channel.ray_rate);
        assign_if(c, "cluster_decay", cfg.channel.cluster_decay);
        assign_if(c, "ray_decay", cfg.channel.ray_decay);
        assign_if(c, "sigma1_db", cfg.channel.sigma1_db);
        assign_if(c, "sigma2_db", cfg.channel.sigma2_db);
        assign_if(c, "tg", cfg.channel.tg);
        assign_if(c, "normalize_energy", cfg.channel.normalize_energy);
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        assign_if(s, "ebn0_db", cfg.sweep.ebn0_db);
        if (s.contains("detectors")) {
            cfg.sweep.detectors.clear();
            for (const auto& name : s.at("detectors"))
                cfg.sweep.detectors.push_back(
                    detector_from_string(name.get<std::string>()));
        }
        assign_if(s, "m_list", cfg.sweep.m_list);
        assign_if(s, "min_errors", cfg.sweep.min_errors);
        assign_if(s, "max_bits", cfg.sweep.max_bits);
        assign_if(s, "block_len", cfg.sweep.block_len);
        assign_if(s, "seed", cfg.sweep.seed);
        assign_if(s, "workers", cfg.sweep.workers);
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace uwb
