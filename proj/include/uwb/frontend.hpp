#pragma once

#include "uwb/dstbc.hpp"
#include "uwb/simkit.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace uwb {

/// The per-frame [0, ti) receive windows of one quasi-static block, one
/// matrix per receive antenna with a column per frame. Frame 2s and 2s+1
/// carry symbol s; nothing outside the integration window is ever
/// synthesized (with tg + tw <= tf the rest of the frame never reaches the
/// correlators).
struct FrameSet {
    std::vector<Eigen::MatrixXd> rx;  // [q-1]: window_samples x n_frames
    double dt = 0.0;

    int nr() const { return static_cast<int>(rx.size()); }
    Eigen::Index n_frames() const { return rx.empty() ? 0 : rx[0].cols(); }
    Eigen::Index window_samples() const { return rx.empty() ? 0 : rx[0].rows(); }
};

/// sqrt(eb/2) * (d1 * g1 + d2 * g2) restricted to [0, ti).
SampledWaveform noiseless_frame(const Eigen::Vector2i& d_col,
                                const SampledWaveform& g1,
                                const SampledWaveform& g2, double eb,
                                double ti);

/// Adds white Gaussian samples of variance n0*fs/2 (ideally sampled noise of
/// two-sided density N0/2). n0 = 0 returns the frame unchanged without
/// consuming the stream.
SampledWaveform add_noise(const SampledWaveform& frame, double n0,
                          RngStream& rng);

/// Riemann correlation sum(a[i]*b[i])*dt over [0, ti), pairwise-accumulated.
double correlate(const SampledWaveform& a, const SampledWaveform& b,
                 double ti);

/// All frame windows for a symbol sequence over one channel realization.
/// `responses` holds g_{q,p} indexed (q-1)*nt + (p-1); pass noise = nullptr
/// (or n0 = 0) for the noiseless pipeline. Noise is drawn antenna-major,
/// frame-major, sample-major.
FrameSet synth_frames(std::span<const SymbolMatrix> symbols,
                      std::span<const SampledWaveform> responses,
                      const SimConfig& cfg, RngStream* noise);

/// 2x2 inter-symbol correlation matrix R^q_{k,y}(u,z) =
/// correlate(frame 2k+u-1, frame 2y+z-1), symbol indices relative to the
/// frame set. Throws if a frame is missing.
Eigen::Matrix2d correlation_matrix(const FrameSet& frames, int q, int k,
                                   int y);

/// R^q_{k,y} summed over receive antennas.
Eigen::Matrix2d correlation_sum(const FrameSet& frames, int k, int y);

/// Complete set of correlation matrices for one MSD observation window of m
/// symbols, pairs 0 <= y < k <= m-1.
class CorrelationSet {
public:
    CorrelationSet(int m, int nr);

    int window_m() const { return m_; }
    int nr() const { return nr_; }

    Eigen::Matrix2d& at(int q, int k, int y);
    const Eigen::Matrix2d& at(int q, int k, int y) const;
    Eigen::Matrix2d sum_over_q(int k, int y) const;

private:
    int pair_index(int k, int y) const;
    int m_;
    int nr_;
    std::vector<Eigen::Matrix2d> mats_;
};

/// Builds the CorrelationSet for the window of m symbols starting at
/// `first_symbol` in the frame set.
CorrelationSet correlation_block(const FrameSet& frames, int first_symbol,
                                 int m);

/// The three noise cross terms of one correlation entry, computed from
/// separately supplied signal and noise windows: a1 = <sig_k, noise_y>,
/// a2 = <sig_y, noise_k>, a3 = <noise_k, noise_y>. Their sum reproduces the
/// noisy correlation minus the signal-only correlation.
struct NoiseComponents {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

NoiseComponents decompose_components(const SampledWaveform& sig_k,
                                     const SampledWaveform& sig_y,
                                     const SampledWaveform& noise_k,
                                     const SampledWaveform& noise_y,
                                     double ti);

/// Correlation trace record for detector-only replay.
struct TraceRecord {
    long long trial = 0;
    int q = 1;
    int k = 0;
    int y = 0;
    int u = 1;
    int z = 1;
    double value = 0.0;
};

/// CSV with header trial,q,k,y,u,z,value.
void write_trace_csv(std::ostream& os, std::span<const TraceRecord> records);
std::vector<TraceRecord> read_trace_csv(std::istream& is);

/// Flattens one window's correlation set into trace records.
std::vector<TraceRecord> trace_records(const CorrelationSet& rset,
                                       long long trial);

/// Rebuilds per-trial correlation sets from trace records (each trial must
/// contain the complete pair set of a fixed window size m). Trials come back
/// in ascending trial order.
std::vector<std::pair<long long, CorrelationSet>> correlation_sets_from_traces(
    std::span<const TraceRecord> records, int m, int nr);

}  // namespace uwb
