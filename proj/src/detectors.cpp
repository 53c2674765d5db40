#include "uwb/detectors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwb {

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::DD: return "dd";
        case DetectorKind::MSD: return "msd";
        case DetectorKind::DFMSD: return "dfmsd";
        case DetectorKind::GENIE_DFMSD: return "genie-dfmsd";
    }
    throw std::logic_error("unknown DetectorKind");
}

DetectorKind detector_from_string(std::string_view name) {
    if (name == "dd") return DetectorKind::DD;
    if (name == "msd") return DetectorKind::MSD;
    if (name == "dfmsd") return DetectorKind::DFMSD;
    if (name == "genie-dfmsd" || name == "genie") return DetectorKind::GENIE_DFMSD;
    throw std::invalid_argument("unknown detector: " + std::string(name));
}

double MetricSet::psi(int m) const {
    switch (m) {
        case 1: return psi1;
        case 2: return psi2;
        case 3: return psi3();
        case 4: return psi4();
    }
    throw std::out_of_range("MetricSet: codeword index must be in 1..4");
}

Codeword MetricSet::decide() const {
    int best = 1;
    double best_val = psi(1);
    for (int m = 2; m <= 4; ++m) {
        const double v = psi(m);
        if (v > best_val) {
            best = m;
            best_val = v;
        }
    }
    return Codeword::from_index(best);
}

double trace_with_codeword(Codeword u, const Eigen::Matrix2d& x) {
    switch (u.index()) {
        case 1: return x(0, 0) + x(1, 1);
        case 2: return x(1, 0) - x(0, 1);
        case 3: return -(x(0, 0) + x(1, 1));
        case 4: return x(0, 1) - x(1, 0);
    }
    throw std::logic_error("unreachable");
}

MetricSet metrics_from_accumulator(const Eigen::Matrix2d& t) {
    MetricSet set;
    set.psi1 = t(0, 0) + t(1, 1);
    set.psi2 = t(1, 0) - t(0, 1);
    return set;
}

Codeword dd_detect(const Eigen::Matrix2d& rsum) {
    return metrics_from_accumulator(rsum).decide();
}

double msd_metric(std::span<const Codeword> candidate,
                  const CorrelationSet& rset) {
    const int m = rset.window_m();
    if (candidate.size() != static_cast<size_t>(m - 1))
        throw std::invalid_argument("msd_metric: candidate length must be m-1");
    // prod_{v=y+1..k} U_v = inverse(prefix_y) * prefix_k with
    // prefix_j = U_1 * .. * U_j (left-to-right, order immaterial in the
    // abelian codebook).
    std::vector<Codeword> prefix(m);
    prefix[0] = Codeword::from_index(1);
    for (int v = 1; v < m; ++v)
        prefix[v] = group_mul(prefix[v - 1], candidate[v - 1]);

    double metric = 0.0;
    for (int k = 1; k < m; ++k)
        for (int y = 0; y < k; ++y)
            metric += trace_with_codeword(
                group_mul(group_inverse(prefix[y]), prefix[k]),
                rset.sum_over_q(k, y));
    return metric;
}

std::vector<Codeword> msd_detect(const CorrelationSet& rset,
                                 DetectorStats* stats) {
    const int m = rset.window_m();
    if (m > 12)
        throw std::invalid_argument(
            "msd_detect: m capped at 12 (use decision feedback beyond)");
    const int n_sym = m - 1;
    std::vector<int> digits(n_sym, 0);  // codeword offsets, odometer order
    std::vector<Codeword> cand(n_sym);
    std::vector<Codeword> best;
    double best_metric = 0.0;
    bool first = true;
    std::uint64_t evaluated = 0;

    for (;;) {
        for (int i = 0; i < n_sym; ++i)
            cand[i] = Codeword::from_index(digits[i] + 1);
        const double metric = msd_metric(cand, rset);
        ++evaluated;
        // Strict > keeps the lexicographically smallest argmax: candidates
        // are enumerated in ascending index order.
        if (first || metric > best_metric) {
            first = false;
            best_metric = metric;
            best = cand;
        }
        int pos = n_sym - 1;
        while (pos >= 0 && digits[pos] == 3) digits[pos--] = 0;
        if (pos < 0) break;
        ++digits[pos];
    }
    if (stats != nullptr) stats->candidates += evaluated;
    return best;
}

Codeword dfmsd_detect(std::span<const Eigen::Matrix2d> rbar,
                      std::span<const Codeword> feedback,
                      MetricSet* metrics, DetectorStats* stats) {
    if (rbar.empty())
        throw std::invalid_argument("dfmsd_detect: no correlation matrices");
    if (feedback.size() + 1 != rbar.size())
        throw std::invalid_argument(
            "dfmsd_detect: need one feedback codeword per past symbol but the "
            "newest");
    const int n = static_cast<int>(rbar.size());
    // T = sum_y Rbar_y * P_y with P_y = prod_{v=y+1..k-1} Uhat_v, built from
    // the newest y down (P for the newest y is the empty product).
    Eigen::Matrix2d t = rbar[n - 1];
    Codeword p = Codeword::from_index(1);
    for (int i = n - 2; i >= 0; --i) {
        p = group_mul(p, feedback[i]);
        t += rbar[i] * p.matrix();
    }
    const MetricSet set = metrics_from_accumulator(t);
    if (metrics != nullptr) *metrics = set;
    if (stats != nullptr) stats->traces += 2;
    return set.decide();
}

}  // namespace uwb
