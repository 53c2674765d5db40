#include "uwb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwb {

namespace {

double adaptive_simpson_step(const std::function<double(double)>& f, double a,
                             double fa, double b, double fb, double m,
                             double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                                 depth - 1) +
           adaptive_simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                                 depth - 1);
}

}  // namespace

double integrate_adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, 48);
}

ConditionalStats stats_from_energy(double eps, const SimConfig& cfg,
                                   double w_bandwidth) {
    if (cfg.m < 2) throw std::invalid_argument("stats_from_energy: m >= 2");
    ConditionalStats st;
    st.eps_total = eps;
    const double mm1 = static_cast<double>(cfg.m - 1);
    st.s = cfg.eb * mm1 * eps;
    st.sigma2 = mm1 * (cfg.eb * cfg.n0 * eps +
                       cfg.nr * cfg.n0 * cfg.n0 * w_bandwidth * cfg.ti);
    return st;
}

ConditionalStats conditional_stats(const ChannelRealization& ch,
                                   const SimConfig& cfg, double w_bandwidth) {
    const SampledWaveform pulse = gaussian_doublet(cfg.tw, cfg.fs);
    double eps = 0.0;
    for (int q = 1; q <= ch.nr(); ++q)
        for (int p = 1; p <= ch.nt(); ++p)
            eps += captured_energy(overall_response(ch, pulse, q, p), cfg.ti);
    return stats_from_energy(eps, cfg, w_bandwidth);
}

double conditional_ber(const ConditionalStats& stats) {
    if (!std::isfinite(stats.s) || !std::isfinite(stats.sigma2))
        throw std::invalid_argument("conditional_ber: non-finite stats");
    if (!(stats.sigma2 > 0.0))
        throw std::invalid_argument("conditional_ber: sigma2 must be > 0");
    const double sigma = std::sqrt(stats.sigma2);
    const double s = stats.s;
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    const double inv_erf_scale = 1.0 / (sigma * std::sqrt(2.0));
    const auto integrand = [&](double psi) {
        const double z = (psi - s) / sigma;
        return std::erf(psi * inv_erf_scale) * inv_norm * std::exp(-0.5 * z * z);
    };
    const double lo = std::max(0.0, s - 10.0 * sigma);
    const double hi = s + 10.0 * sigma;
    const double pc = integrate_adaptive_simpson(integrand, lo, hi, 1e-12);
    return std::clamp(0.5 * (1.0 - pc), 0.0, 0.5);
}

TheoryBerPoint average_ber(const SimConfig& cfg, const ChannelParams& params,
                           int n_channels, RngStream& rng) {
    if (n_channels < 1)
        throw std::invalid_argument("average_ber: n_channels must be >= 1");
    const double w = cfg.noise_bandwidth();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n_channels; ++i) {
        const ChannelRealization ch = draw_channel(params, cfg.nr, cfg.nt, rng);
        const double ber = conditional_ber(conditional_stats(ch, cfg, w));
        sum += ber;
        sum_sq += ber * ber;
    }
    TheoryBerPoint point;
    point.ebn0_db = 10.0 * std::log10(cfg.eb / cfg.n0);
    point.n_channels = n_channels;
    point.ber = sum / n_channels;
    if (n_channels > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / n_channels) / (n_channels - 1));
        point.mc_std_error = std::sqrt(var / n_channels);
    }
    return point;
}

}  // namespace uwb
