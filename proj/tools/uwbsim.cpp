#include "uwb/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_ebn0(const std::string& text) {
    std::vector<double> grid;
    // start:stop:step or a comma list
    if (text.find(':') != std::string::npos) {
        double start = 0.0;
        double stop = 0.0;
        double step = 1.0;
        if (std::sscanf(text.c_str(), "%lg:%lg:%lg", &start, &stop, &step) != 3 ||
            step <= 0.0)
            throw CLI::ValidationError("--ebn0", "expected start:stop:step");
        for (double e = start; e <= stop + 1e-9; e += step) grid.push_back(e);
        return grid;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    return grid;
}

std::vector<uwb::DetectorKind> parse_detectors(const std::string& text) {
    std::vector<uwb::DetectorKind> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(uwb::detector_from_string(tok));
    return out;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

void write_points(const std::string& out_path,
                  const std::vector<uwb::BerPoint>& points,
                  bool include_timing) {
    if (out_path.empty() || out_path == "-") {
        uwb::emit_csv(std::cout, points, include_timing);
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open output: " + out_path);
    uwb::emit_csv(os, points, include_timing);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noncoherent MIMO UWB differential space-time simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string detector_arg;
    std::string m_arg;
    std::string ebn0_arg;
    std::string out_path;
    std::string trace_out;
    long long min_errors = -1;
    long long max_bits = -1;
    std::int64_t seed = -1;
    int workers = -1;
    int block_len = -1;
    bool no_timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--detector", detector_arg,
                        "comma list: dd,msd,dfmsd,genie-dfmsd");
        cmd->add_option("--M", m_arg, "comma list of window sizes");
        cmd->add_option("--ebn0", ebn0_arg, "Eb/N0 grid, start:stop:step or list");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_path, "output CSV path (default stdout)");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo BER sweep");
    add_common(sweep);
    sweep->add_option("--min-errors", min_errors, "errors per grid point");
    sweep->add_option("--max-bits", max_bits, "bit budget per grid point");
    sweep->add_option("--workers", workers, "worker threads (0 = all cores)");
    sweep->add_option("--block-len", block_len, "symbols per channel draw");
    sweep->add_option("--trace-out", trace_out,
                      "also dump correlation traces of the first grid point");
    sweep->add_flag("--no-timing", no_timing,
                    "write 0 in the seconds column (byte-stable output)");

    int n_channels = 1000;
    CLI::App* theory = app.add_subcommand("theory", "genie-aided BER bound");
    add_common(theory);
    theory->add_option("--channels", n_channels, "channel realizations to average");

    std::uint64_t val_seed = 1;
    int val_draws = 100000;
    CLI::App* validate =
        app.add_subcommand("validate", "variance and metric-identity oracles");
    validate->add_option("--seed", val_seed, "suite seed");
    validate->add_option("--draws", val_draws, "Monte Carlo draws");

    std::string replay_in;
    std::string replay_detector = "msd";
    int replay_m = 3;
    int replay_nr = 1;
    CLI::App* replay =
        app.add_subcommand("replay", "run detectors on a correlation trace CSV");
    replay->add_option("--in", replay_in, "trace CSV")->required();
    replay->add_option("--detector", replay_detector, "dd|msd|dfmsd");
    replay->add_option("--M", replay_m, "window size");
    replay->add_option("--nr", replay_nr, "receive antennas in the trace");
    replay->add_option("--out", out_path, "decisions CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        uwb::Config cfg;
        if (!config_path.empty()) cfg = uwb::load_config(config_path);
        if (!detector_arg.empty()) cfg.sweep.detectors = parse_detectors(detector_arg);
        if (!m_arg.empty()) cfg.sweep.m_list = parse_ints(m_arg);
        if (!ebn0_arg.empty()) cfg.sweep.ebn0_db = parse_ebn0(ebn0_arg);
        if (seed >= 0) cfg.sweep.seed = static_cast<std::uint64_t>(seed);
        if (min_errors >= 0) cfg.sweep.min_errors = min_errors;
        if (max_bits >= 0) cfg.sweep.max_bits = max_bits;
        if (workers >= 0) cfg.sweep.workers = workers;
        if (block_len >= 0) cfg.sweep.block_len = block_len;

        if (sweep->parsed()) {
            if (cfg.sweep.detectors.empty())
                cfg.sweep.detectors = {uwb::DetectorKind::DD};
            const auto points = uwb::run_sweep(cfg.sweep, cfg.sim, cfg.channel);
            write_points(out_path, points, !no_timing);
            if (!trace_out.empty()) {
                uwb::SimConfig tc = cfg.sim;
                tc.m = cfg.sweep.m_list.front();
                tc.eb = std::pow(10.0, cfg.sweep.ebn0_db.front() / 10.0);
                tc.n0 = 1.0;
                const auto records =
                    uwb::trace_block(tc, cfg.channel, cfg.sweep.seed, 16);
                std::ofstream os(trace_out);
                if (!os) throw std::runtime_error("cannot open " + trace_out);
                uwb::write_trace_csv(os, records);
            }
        } else if (theory->parsed()) {
            const auto points =
                uwb::theory_sweep(cfg.sweep, cfg.sim, cfg.channel, n_channels);
            write_points(out_path, points, !no_timing);
        } else if (validate->parsed()) {
            const auto report = uwb::run_validation(val_seed, val_draws);
            uwb::print_validation(std::cout, report);
            return report.all_pass() ? 0 : 1;
        } else if (replay->parsed()) {
            std::ifstream is(replay_in);
            if (!is) throw std::runtime_error("cannot open " + replay_in);
            const auto records = uwb::read_trace_csv(is);
            const auto decisions = uwb::run_replay(
                records, uwb::detector_from_string(replay_detector), replay_m,
                replay_nr);
            if (out_path.empty() || out_path == "-") {
                uwb::write_decisions_csv(std::cout, decisions);
            } else {
                std::ofstream os(out_path);
                if (!os) throw std::runtime_error("cannot open " + out_path);
                uwb::write_decisions_csv(os, decisions);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
