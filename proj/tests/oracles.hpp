// Independent reference implementations used by the test suites only. These
// deliberately avoid the library's prefix tables and trace shortcuts.
#pragma once

#include "uwb/detectors.hpp"
#include "uwb/simkit.hpp"

#include <cmath>
#include <vector>

namespace uwb::testing {

inline void oracle_msd_recurse(const CorrelationSet& rset,
                               std::vector<Codeword>& cand,
                               std::vector<Codeword>& best,
                               double& best_metric, bool& have_best) {
    const int m = rset.window_m();
    if (static_cast<int>(cand.size()) == m - 1) {
        double metric = 0.0;
        for (int k = 1; k < m; ++k)
            for (int y = 0; y < k; ++y) {
                Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
                for (int v = y + 1; v <= k; ++v)
                    prod = prod * cand[v - 1].matrix();
                metric += (prod * rset.sum_over_q(k, y)).trace();
            }
        if (!have_best || metric > best_metric) {
            have_best = true;
            best_metric = metric;
            best = cand;
        }
        return;
    }
    for (int m1 = 1; m1 <= 4; ++m1) {
        cand.push_back(Codeword::from_index(m1));
        oracle_msd_recurse(rset, cand, best, best_metric, have_best);
        cand.pop_back();
    }
}

/// Exhaustive MSD by recursive enumeration with literal matrix products;
/// ascending enumeration keeps the lexicographically smallest argmax.
inline std::vector<Codeword> oracle_msd(const CorrelationSet& rset) {
    std::vector<Codeword> cand;
    std::vector<Codeword> best;
    double best_metric = 0.0;
    bool have_best = false;
    oracle_msd_recurse(rset, cand, best, best_metric, have_best);
    return best;
}

struct McBer {
    double ber = 0.0;
    double se = 0.0;
};

/// P(psi1 > |psi2|, psi1 > 0) by direct simulation of the two conditional
/// Gaussians, mapped to BER through the Gray factor 1/2.
inline McBer mc_two_gaussian_ber(double s, double sigma, long long draws,
                                 RngStream& rng) {
    long long correct = 0;
    for (long long i = 0; i < draws; ++i) {
        const double psi1 = s + sigma * rng.gaussian();
        const double psi2 = sigma * rng.gaussian();
        if (psi1 > std::abs(psi2) && psi1 > 0.0) ++correct;
    }
    const double pc = static_cast<double>(correct) / static_cast<double>(draws);
    const double se_pc = std::sqrt(
        std::max(pc * (1.0 - pc), 1.0 / static_cast<double>(draws)) /
        static_cast<double>(draws));
    return {0.5 * (1.0 - pc), 0.5 * se_pc};
}

}  // namespace uwb::testing
