#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uwb/harness.hpp"

#include <cmath>
#include <sstream>

using namespace uwb;

namespace {

SimConfig base_config(double ebn0_db) {
    SimConfig cfg;
    cfg.eb = std::pow(10.0, ebn0_db / 10.0);
    cfg.n0 = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("noiseless blocks decode perfectly for every detector") {
    SimConfig cfg = base_config(10.0);
    cfg.n0 = 0.0;
    cfg.m = 4;
    cfg.block_len = 100;
    ChannelParams params;
    for (DetectorKind det : {DetectorKind::DD, DetectorKind::MSD,
                             DetectorKind::DFMSD, DetectorKind::GENIE_DFMSD}) {
        for (std::uint64_t b = 0; b < 3; ++b) {
            const BlockResult r = run_block(cfg, params, det, 99, b);
            CHECK(r.bits == 200);
            CHECK(r.errors == 0);
        }
    }
}

TEST_CASE("noiseless partial MSD windows also decode perfectly") {
    SimConfig cfg = base_config(10.0);
    cfg.n0 = 0.0;
    cfg.m = 4;
    cfg.block_len = 5;  // 5 = 3 + 2: forces a shortened tail window
    ChannelParams params;
    const BlockResult r = run_block(cfg, params, DetectorKind::MSD, 7, 0);
    CHECK(r.bits == 10);
    CHECK(r.errors == 0);
}

TEST_CASE("msd with m = 2 is bit-identical to dd on the same streams") {
    SimConfig cfg = base_config(14.0);
    cfg.m = 2;
    cfg.block_len = 100;
    ChannelParams params;
    long long total_errors = 0;
    for (std::uint64_t b = 0; b < 20; ++b) {
        std::vector<Codeword> dd_dec, msd_dec;
        const BlockResult rd =
            run_block(cfg, params, DetectorKind::DD, 5, b, &dd_dec);
        const BlockResult rm =
            run_block(cfg, params, DetectorKind::MSD, 5, b, &msd_dec);
        CHECK(rd.bits == rm.bits);
        CHECK(rd.errors == rm.errors);
        REQUIRE(dd_dec.size() == msd_dec.size());
        for (size_t i = 0; i < dd_dec.size(); ++i)
            CHECK(dd_dec[i] == msd_dec[i]);
        total_errors += rd.errors;
    }
    CHECK(total_errors > 0);  // the comparison exercised noisy decisions
}

TEST_CASE("genie equals real feedback when no feedback errors occur") {
    SimConfig cfg = base_config(20.0);
    cfg.m = 4;
    cfg.block_len = 100;
    ChannelParams params;
    for (std::uint64_t b = 0; b < 10; ++b) {
        const BlockResult real =
            run_block(cfg, params, DetectorKind::DFMSD, 21, b);
        const BlockResult genie =
            run_block(cfg, params, DetectorKind::GENIE_DFMSD, 21, b);
        CHECK(real.errors == genie.errors);
    }
}

TEST_CASE("genie dominance at a noisy operating point") {
    SweepSpec spec;
    spec.ebn0_db = {14.0};
    spec.m_list = {4};
    spec.min_errors = 150;
    spec.max_bits = 400000;
    spec.seed = 33;
    ChannelParams params;

    spec.detectors = {DetectorKind::GENIE_DFMSD};
    const BerPoint genie = run_sweep(spec, SimConfig{}, params).front();
    spec.detectors = {DetectorKind::DFMSD};
    const BerPoint real = run_sweep(spec, SimConfig{}, params).front();
    REQUIRE(genie.errors >= 100);
    REQUIRE(real.errors >= 100);
    CHECK(genie.ber <= real.ber + 2.0 * (genie.ci95 + real.ci95));
}

TEST_CASE("block preconditions") {
    SimConfig cfg = base_config(10.0);
    cfg.m = 8;
    cfg.block_len = 4;
    ChannelParams params;
    CHECK_THROWS_AS(run_block(cfg, params, DetectorKind::DD, 1, 0),
                    std::invalid_argument);
}

TEST_CASE("sweep stopping rule") {
    SweepSpec spec;
    spec.ebn0_db = {8.0, 14.0};
    spec.detectors = {DetectorKind::DD};
    spec.min_errors = 5;
    spec.max_bits = 2000;
    spec.block_len = 100;
    spec.seed = 4;
    const auto points = run_sweep(spec, SimConfig{}, ChannelParams{});
    REQUIRE(points.size() == 2);
    for (const BerPoint& p : points) {
        CHECK((p.errors >= spec.min_errors || p.bits >= spec.max_bits));
        CHECK(p.bits <= spec.max_bits + 200);  // at most one block overshoot
        CHECK(p.ber == doctest::Approx(static_cast<double>(p.errors) / p.bits));
    }
}

TEST_CASE("sweep is deterministic and worker-count independent") {
    SweepSpec spec;
    spec.ebn0_db = {12.0, 15.0};
    spec.detectors = {DetectorKind::DD, DetectorKind::DFMSD};
    spec.m_list = {3};
    spec.min_errors = 40;
    spec.max_bits = 40000;
    spec.seed = 17;

    spec.workers = 1;
    const auto a = run_sweep(spec, SimConfig{}, ChannelParams{});
    spec.workers = 3;
    const auto b = run_sweep(spec, SimConfig{}, ChannelParams{});
    const auto c = run_sweep(spec, SimConfig{}, ChannelParams{});
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].bits == b[i].bits);
        CHECK(a[i].errors == b[i].errors);
        CHECK(a[i].ber == b[i].ber);
        CHECK(b[i].bits == c[i].bits);
        CHECK(b[i].errors == c[i].errors);
    }
}

TEST_CASE("simulated DD sits clearly above the genie theory bound") {
    ChannelParams params;
    SweepSpec tspec;
    tspec.m_list = {4};
    tspec.ebn0_db = {11.0, 11.5, 12.0, 12.5, 13.0};
    tspec.seed = 88;
    const auto curve = theory_sweep(tspec, SimConfig{}, params, 800);
    const BerPoint* bound = &curve.front();
    for (const BerPoint& p : curve)
        if (p.ber > 0.0 && std::abs(std::log10(p.ber) + 2.0) <
                               std::abs(std::log10(bound->ber) + 2.0))
            bound = &p;
    REQUIRE(bound->ber > 1e-3);

    SweepSpec dspec;
    dspec.ebn0_db = {bound->ebn0_db};
    dspec.detectors = {DetectorKind::DD};
    dspec.min_errors = 200;
    dspec.max_bits = 100000;
    dspec.seed = 88;
    const BerPoint dd = run_sweep(dspec, SimConfig{}, params).front();
    const double combined =
        std::hypot(dd.ci95 / 1.96, bound->ci95 / 1.96);
    CHECK(dd.ber - bound->ber > 3.0 * combined);
}

TEST_CASE("csv emission") {
    SUBCASE("empty input emits only the header") {
        std::stringstream ss;
        emit_csv(ss, {}, true);
        CHECK(ss.str() == "source,detector,M,ebn0_db,bits,errors,ber,ci95,seconds\n");
    }
    SUBCASE("one point emits two lines") {
        BerPoint p;
        p.detector = DetectorKind::MSD;
        p.m = 3;
        p.ebn0_db = 12.0;
        p.bits = 1000;
        p.errors = 10;
        p.ber = 0.01;
        p.ci95 = 0.006;
        p.wall_seconds = 1.25;
        std::stringstream ss;
        emit_csv(ss, {p}, false);
        CHECK(ss.str() ==
              "source,detector,M,ebn0_db,bits,errors,ber,ci95,seconds\n"
              "sim,msd,3,12,1000,10,0.01,0.006,0.000\n");
    }
    SUBCASE("rows sort by source, detector, M, ebn0") {
        BerPoint sim1, sim2, th;
        sim1.detector = DetectorKind::DFMSD;
        sim1.m = 4;
        sim1.ebn0_db = 14.0;
        sim2.detector = DetectorKind::DD;
        sim2.m = 2;
        sim2.ebn0_db = 16.0;
        th.source = "theory";
        th.detector = DetectorKind::GENIE_DFMSD;
        th.m = 4;
        th.ebn0_db = 10.0;
        std::stringstream ss;
        emit_csv(ss, {th, sim1, sim2}, false);
        std::string line;
        std::getline(ss, line);  // header
        std::getline(ss, line);
        CHECK(line.rfind("sim,dd,2,16", 0) == 0);
        std::getline(ss, line);
        CHECK(line.rfind("sim,dfmsd,4,14", 0) == 0);
        std::getline(ss, line);
        CHECK(line.rfind("theory,genie-dfmsd,4,10", 0) == 0);
    }
}

TEST_CASE("theory sweep emits bound points on the grid") {
    SweepSpec spec;
    spec.ebn0_db = {14.0, 12.0};
    spec.detectors = {DetectorKind::GENIE_DFMSD};
    spec.m_list = {4};
    spec.seed = 3;
    const auto pts = theory_sweep(spec, SimConfig{}, ChannelParams{}, 64);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].ebn0_db == 12.0);
    CHECK(pts[1].ebn0_db == 14.0);
    for (const auto& p : pts) {
        CHECK(p.source == "theory");
        CHECK(p.bits == 64);
        CHECK(p.ber > 0.0);
        CHECK(p.ber < 0.5);
        CHECK(p.ci95 > 0.0);
    }
    CHECK(pts[1].ber < pts[0].ber);
}

TEST_CASE("config parsing") {
    const std::string text = R"({
      "sim": {"ti": 15e-9, "fs": 25e9, "nr": 1, "block_len": 64, "seed": 9},
      "channel": {"cluster_rate": 0.5, "ray_decay": 7.1, "tg": 90e-9,
                  "normalize_energy": true},
      "sweep": {"ebn0_db": [10, 12], "detectors": ["dd", "genie-dfmsd"],
                "m_list": [2, 4], "min_errors": 77, "max_bits": 5000,
                "block_len": 50, "seed": 12, "workers": 2}
    })";
    const Config cfg = parse_config(text);
    CHECK(cfg.sim.ti == doctest::Approx(15e-9));
    CHECK(cfg.sim.fs == doctest::Approx(25e9));
    CHECK(cfg.sim.block_len == 64);
    CHECK(cfg.sim.seed == 9);
    CHECK(cfg.sim.tf == doctest::Approx(100e-9));  // default preserved
    CHECK(cfg.channel.cluster_rate == doctest::Approx(0.5));
    CHECK(cfg.channel.ray_decay == doctest::Approx(7.1));
    CHECK(cfg.channel.tg == doctest::Approx(90e-9));
    REQUIRE(cfg.sweep.detectors.size() == 2);
    CHECK(cfg.sweep.detectors[0] == DetectorKind::DD);
    CHECK(cfg.sweep.detectors[1] == DetectorKind::GENIE_DFMSD);
    CHECK(cfg.sweep.min_errors == 77);
    CHECK(cfg.sweep.max_bits == 5000);
    CHECK(cfg.sweep.workers == 2);

    CHECK_THROWS(parse_config("{not json"));
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"detectors": ["nope"]}})"),
                    std::invalid_argument);
}

TEST_CASE("replay reproduces in-process decisions") {
    SimConfig cfg = base_config(13.0);
    cfg.m = 3;
    ChannelParams params;
    const auto records = trace_block(cfg, params, 55, 4);
    REQUIRE(!records.empty());

    // Through CSV text and back.
    std::stringstream ss;
    write_trace_csv(ss, records);
    const auto back = read_trace_csv(ss);

    const auto decisions = run_replay(back, DetectorKind::MSD, 3, 1);
    const auto sets = correlation_sets_from_traces(back, 3, 1);
    REQUIRE(sets.size() == 4);
    size_t di = 0;
    for (const auto& [trial, rset] : sets) {
        const auto want = msd_detect(rset);
        for (int k = 1; k < 3; ++k) {
            REQUIRE(di < decisions.size());
            CHECK(decisions[di].trial == trial);
            CHECK(decisions[di].k == k);
            CHECK(decisions[di].u == want[k - 1]);
            ++di;
        }
    }

    const auto dd_decisions = run_replay(back, DetectorKind::DD, 3, 1);
    CHECK(dd_decisions.size() == 4);
    for (const auto& d : dd_decisions) CHECK(d.k == 1);

    std::stringstream os;
    write_decisions_csv(os, decisions);
    std::string header;
    std::getline(os, header);
    CHECK(header == "trial,k,codeword,b1,b2");
}

TEST_CASE("validation suite passes at reduced scale") {
    const ValidationReport rep = run_validation(2024, 50000, 2000);
    for (const ValidationCheck& c : rep.checks) {
        INFO(c.name, ": measured=", c.measured, " expected=", c.expected);
        CHECK(c.pass);
    }
    CHECK(rep.all_pass());
    CHECK(rep.eps_total > 0.0);
    std::stringstream ss;
    print_validation(ss, rep);
    CHECK(ss.str().find("ALL PASS") != std::string::npos);
}
