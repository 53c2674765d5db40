#pragma once

#include "uwb/channel.hpp"
#include "uwb/detectors.hpp"
#include "uwb/frontend.hpp"
#include "uwb/simkit.hpp"
#include "uwb/theory.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uwb {

struct SweepSpec {
    std::vector<double> ebn0_db;
    std::vector<DetectorKind> detectors;
    std::vector<int> m_list{2};
    long long min_errors = 200;
    long long max_bits = 10'000'000;
    int block_len = 100;
    std::uint64_t seed = 1;
    int workers = 1;  // 0 = hardware concurrency

    void validate() const;
};

struct BerPoint {
    std::string source = "sim";
    DetectorKind detector = DetectorKind::DD;
    int m = 2;
    double ebn0_db = 0.0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    double ci95 = 0.0;
    double wall_seconds = 0.0;
};

struct BlockResult {
    long long bits = 0;
    long long errors = 0;
};

/// One quasi-static block: draws a channel, differentially encodes random
/// bits from D0, synthesizes the noisy frame windows, runs the detector over
/// the block (sliding window for the feedback detectors, disjoint windows of
/// m-1 codewords for MSD), and counts bit errors through the inverse Gray
/// map. Streams are derived as (seed_base, "channel"/"data"/"noise",
/// block_index), so equal keys reproduce the identical block for any
/// detector. Optionally reports the decided and true codeword sequences.
BlockResult run_block(const SimConfig& cfg, const ChannelParams& params,
                      DetectorKind detector, std::uint64_t seed_base,
                      std::uint64_t block_index,
                      std::vector<Codeword>* decisions = nullptr,
                      std::vector<Codeword>* truth = nullptr);

/// Monte Carlo BER sweep over (detector, m, Eb/N0) grid points. Each point
/// accumulates whole blocks until min_errors errors or max_bits bits.
/// Results are bit-identical for any worker count: blocks are scheduled in
/// fixed-size waves keyed by block index, and the stopping rule is applied
/// in block order after each wave.
std::vector<BerPoint> run_sweep(const SweepSpec& spec, SimConfig cfg,
                                const ChannelParams& params);

/// Analytical genie-aided lower-bound curves on the same grid, emitted with
/// source = "theory". The bits column of a theory point records the number
/// of channel realizations averaged.
std::vector<BerPoint> theory_sweep(const SweepSpec& spec, SimConfig cfg,
                                   const ChannelParams& params,
                                   int n_channels);

/// CSV with header source,detector,M,ebn0_db,bits,errors,ber,ci95,seconds,
/// rows sorted by (source, detector, M, ebn0). Wall time is the one
/// nondeterministic output; include_timing = false writes 0.000 in that
/// column so byte-identical runs can be compared.
void emit_csv(std::ostream& os, std::vector<BerPoint> points,
              bool include_timing = true);

/// Correlation traces of the first blocks of a grid point, one trial per
/// MSD window, for detector-only replay.
std::vector<TraceRecord> trace_block(const SimConfig& cfg,
                                     const ChannelParams& params,
                                     std::uint64_t seed_base, int n_trials);

struct ReplayDecision {
    long long trial = 0;
    int k = 0;
    Codeword u;
};

/// Runs a detector over per-trial correlation windows rebuilt from traces.
std::vector<ReplayDecision> run_replay(std::span<const TraceRecord> records,
                                       DetectorKind detector, int m, int nr);

void write_decisions_csv(std::ostream& os,
                         std::span<const ReplayDecision> decisions);

/// One check of the statistical validation suite.
struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  // |measured-expected| <= tolerance * scale
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double eps_total = 0.0;
    double w_bandwidth = 0.0;
    bool all_pass() const;
};

/// Monte Carlo oracle suite on one fixed channel: sample variances of the
/// noise cross terms A1, A2, A3 against their conditional formulas, the
/// genie metric mean/variance against the conditional Gaussian statistics,
/// cross-covariance nullity, and the exact psi3 = -psi1, psi4 = -psi2 metric
/// identities on random correlation sets.
ValidationReport run_validation(std::uint64_t seed, int n_draws = 100000,
                                int n_identity_draws = 10000);

void print_validation(std::ostream& os, const ValidationReport& report);

/// JSON configuration mirroring SimConfig / ChannelParams / SweepSpec field
/// names, grouped under "sim", "channel" and "sweep".
struct Config {
    SimConfig sim;
    ChannelParams channel;
    SweepSpec sweep;
};

Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

}  // namespace uwb
