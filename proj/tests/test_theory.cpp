#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uwb/theory.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace uwb;

namespace {

// Maclaurin series with long double terms, accurate far below 1e-12 on the
// tested range.
double erf_series(double x) {
    long double sum = 0.0L;
    long double term = static_cast<long double>(x);
    for (int n = 0; n < 80; ++n) {
        sum += term / (2 * n + 1);
        term *= -static_cast<long double>(x) * x / (n + 1);
    }
    return static_cast<double>(sum * 2.0L / std::sqrt(3.14159265358979323846264338328L));
}

}  // namespace

TEST_CASE("quadrature on known integrals") {
    CHECK(integrate_adaptive_simpson([](double x) { return x * x; }, 0, 1,
                                     1e-14) == doctest::Approx(1.0 / 3.0));
    const double gauss = integrate_adaptive_simpson(
        [](double x) { return std::exp(-0.5 * x * x); }, -10, 10, 1e-13);
    CHECK(gauss == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    CHECK(integrate_adaptive_simpson([](double x) { return x; }, 1, 1, 1e-12) ==
          0.0);
}

TEST_CASE("erf evaluation is accurate to 1e-12 against the series") {
    for (int i = 1; i <= 20; ++i) {
        const double x = 0.1 * i;
        CHECK(std::abs(std::erf(x) - erf_series(x)) <= 1e-12);
    }
}

TEST_CASE("conditional statistics formulas") {
    SimConfig cfg;

    SUBCASE("mean at M=2, Eb=1, eps=1") {
        cfg.m = 2;
        cfg.eb = 1.0;
        cfg.n0 = 0.1;
        const ConditionalStats st = stats_from_energy(1.0, cfg, cfg.noise_bandwidth());
        CHECK(st.s == doctest::Approx(1.0));
    }
    SUBCASE("variance at M=3, N0=0.1, W*Ti=400") {
        cfg.m = 3;
        cfg.eb = 1.0;
        cfg.n0 = 0.1;
        cfg.ti = 20e-9;
        const double w = 400.0 / cfg.ti;
        const ConditionalStats st = stats_from_energy(1.0, cfg, w);
        CHECK(st.sigma2 == doctest::Approx(8.2));
        CHECK(st.s == doctest::Approx(2.0));
    }
    SUBCASE("energy computed from a handcrafted channel") {
        cfg.m = 2;
        cfg.eb = 3.0;
        cfg.n0 = 0.1;
        ChannelRealization ch(1, 2);
        ch.taps(1, 1).push_back({0.0, 1.0});  // unit pulse energy inside ti
        const ConditionalStats st = conditional_stats(ch, cfg, cfg.noise_bandwidth());
        CHECK(st.eps_total == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(st.s == doctest::Approx(3.0).epsilon(1e-3));
    }
}

TEST_CASE("conditional BER edge values") {
    SUBCASE("S = 0 gives exactly 3/8") {
        ConditionalStats st;
        st.s = 0.0;
        st.sigma2 = 4.0;
        CHECK(std::abs(conditional_ber(st) - 0.375) <= 1e-9);
    }
    SUBCASE("very high ratio vanishes") {
        ConditionalStats st;
        st.s = 20.0;
        st.sigma2 = 1.0;
        CHECK(conditional_ber(st) < 1e-15);
    }
    SUBCASE("invalid stats rejected") {
        ConditionalStats st;
        st.s = 1.0;
        st.sigma2 = 0.0;
        CHECK_THROWS_AS(conditional_ber(st), std::invalid_argument);
        st.sigma2 = std::nan("");
        CHECK_THROWS_AS(conditional_ber(st), std::invalid_argument);
    }
}

TEST_CASE("conditional BER strictly decreases in S/sigma") {
    ConditionalStats st;
    st.sigma2 = 2.25;
    double prev = 0.5;
    for (double ratio : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0}) {
        st.s = ratio * 1.5;
        const double ber = conditional_ber(st);
        CHECK(ber < prev);
        prev = ber;
    }
}

TEST_CASE("quadrature matches the two-Gaussian Monte Carlo oracle") {
    RngStream rng(77, "mc", 0);
    for (double sigma : {0.5, 2.0, 8.0}) {
        for (double ratio : {0.0, 1.0, 3.0}) {
            ConditionalStats st;
            st.s = ratio * sigma;
            st.sigma2 = sigma * sigma;
            const double quad = conditional_ber(st);
            const testing::McBer mc =
                testing::mc_two_gaussian_ber(st.s, sigma, 1000000, rng);
            CHECK(std::abs(quad - mc.ber) <= 3.0 * mc.se);
        }
    }
}

TEST_CASE("theory BER is nonincreasing in the window size") {
    SimConfig cfg;
    cfg.eb = std::pow(10.0, 1.4);  // 14 dB
    cfg.n0 = 1.0;
    double prev = 0.5;
    for (int m : {2, 3, 5, 10}) {
        cfg.m = m;
        const ConditionalStats st = stats_from_energy(0.8, cfg, cfg.noise_bandwidth());
        const double ber = conditional_ber(st);
        CHECK(ber <= prev);
        prev = ber;
    }
}

TEST_CASE("channel averaging") {
    SimConfig cfg;
    cfg.eb = std::pow(10.0, 1.5);
    cfg.n0 = 1.0;
    cfg.m = 4;
    ChannelParams params;

    SUBCASE("degenerate single-tap ensemble equals the conditional value") {
        ChannelParams degenerate;
        degenerate.cluster_rate = 100.0;
        degenerate.ray_rate = 1e-6;
        degenerate.cluster_decay = 1e-12;
        degenerate.ray_decay = 1e-12;
        degenerate.tg = 5e-9;
        RngStream rng(3, "theory", 0);
        const TheoryBerPoint pt = average_ber(cfg, degenerate, 1, rng);
        RngStream rng2(3, "theory", 0);
        const ChannelRealization ch = draw_channel(degenerate, 1, 2, rng2);
        const double direct =
            conditional_ber(conditional_stats(ch, cfg, cfg.noise_bandwidth()));
        CHECK(pt.ber == direct);
        CHECK(pt.mc_std_error == 0.0);
    }
    SUBCASE("fixed seed reproduces the identical point") {
        RngStream a(9, "theory", 0);
        RngStream b(9, "theory", 0);
        const TheoryBerPoint p1 = average_ber(cfg, params, 50, a);
        const TheoryBerPoint p2 = average_ber(cfg, params, 50, b);
        CHECK(p1.ber == p2.ber);
        CHECK(p1.mc_std_error == p2.mc_std_error);
    }
    SUBCASE("ensemble size self-consistency") {
        RngStream a(11, "theory", 0);
        RngStream b(12, "theory", 0);
        const TheoryBerPoint small = average_ber(cfg, params, 1000, a);
        const TheoryBerPoint big = average_ber(cfg, params, 10000, b);
        const double se = std::hypot(small.mc_std_error, big.mc_std_error);
        CHECK(std::abs(small.ber - big.ber) <= 3.0 * se);
    }
}
