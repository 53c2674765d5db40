#pragma once

#include "uwb/dstbc.hpp"
#include "uwb/frontend.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace uwb {

enum class DetectorKind { DD, MSD, DFMSD, GENIE_DFMSD };

std::string_view to_string(DetectorKind kind);
DetectorKind detector_from_string(std::string_view name);

/// Search-effort counters for the complexity contracts: MSD evaluates
/// exactly 4^(M-1) candidate sequences, decision feedback exactly two traces
/// per decision.
struct DetectorStats {
    std::uint64_t candidates = 0;
    std::uint64_t traces = 0;
};

/// The four per-codeword decision metrics. Only two traces are ever
/// computed: psi3 = -psi1 and psi4 = -psi2 because U(3) = -U(1) and
/// U(4) = -U(2).
struct MetricSet {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi3() const { return -psi1; }
    double psi4() const { return -psi2; }

    double psi(int m) const;
    /// Argmax over the four metrics, smallest codeword index on ties.
    Codeword decide() const;
};

/// Metrics from the accumulated 2x2 matrix T = sum_y Rbar_{k,y} * P_y:
/// psi_m = Tr(U(m) * T).
MetricSet metrics_from_accumulator(const Eigen::Matrix2d& t);

/// Tr(U(m) * x) without forming the product.
double trace_with_codeword(Codeword u, const Eigen::Matrix2d& x);

/// Symbol-by-symbol differential detection: argmax_m Tr(U(m) * rsum),
/// smallest index on ties.
Codeword dd_detect(const Eigen::Matrix2d& rsum);

/// Joint MSD sequence metric of Eq-form
/// sum_k sum_{y<k} Tr( prod_{v=y+1..k} U_v * sum_q R^q_{k,y} ) for a
/// candidate of rset.window_m()-1 codewords.
double msd_metric(std::span<const Codeword> candidate,
                  const CorrelationSet& rset);

/// Exhaustive joint detection over all 4^(m-1) candidate sequences; ties
/// resolved toward the lexicographically smallest codeword-index sequence.
/// m is capped at 12.
std::vector<Codeword> msd_detect(const CorrelationSet& rset,
                                 DetectorStats* stats = nullptr);

/// One decision-feedback step. rbar holds sum_q R^q_{k,y} for the window's
/// past symbols in ascending y; feedback holds the fed-back codewords
/// U_{y+1}..U_{k-1} aligned with rbar (so feedback.size() ==
/// rbar.size() - 1). Genie operation is the caller passing true codewords.
/// With a single correlation matrix this is exactly dd_detect.
Codeword dfmsd_detect(std::span<const Eigen::Matrix2d> rbar,
                      std::span<const Codeword> feedback,
                      MetricSet* metrics = nullptr,
                      DetectorStats* stats = nullptr);

}  // namespace uwb
