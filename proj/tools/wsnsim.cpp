#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "wsn/config.hpp"
#include "wsn/metrics.hpp"
#include "wsn/replay_oracle.hpp"
#include "wsn/simulation.hpp"
#include "wsn/trace.hpp"

namespace {

// exit codes: 0 ok, 1 runtime failure, 2 bad config, 3 verification failed
constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;
constexpr int kVerifyFailed = 3;

std::string output_dir(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("WSNSIM_OUT"); env != nullptr && *env != '\0') return env;
    return ".";
}

std::string trace_path(const std::string& dir, const wsn::TraceMeta& meta) {
    return dir + "/" + meta.scenario + "_s" + std::to_string(meta.seed) +
           (meta.detection ? "_on" : "_off") + ".trace";
}

wsn::TraceLog simulate(wsn::ScenarioConfig cfg) {
    wsn::Simulator sim(std::move(cfg));
    return sim.run();
}

int cmd_run(const std::string& config_path, const std::string& out_opt, bool no_detection,
            bool verify, std::optional<std::uint64_t> seed) {
    wsn::ScenarioConfig cfg = wsn::ScenarioConfig::load(config_path);
    if (seed) cfg.seed = *seed;
    if (no_detection) cfg.detection_enabled = false;

    const wsn::TraceLog trace = simulate(std::move(cfg));
    const std::string dir = output_dir(out_opt);
    std::filesystem::create_directories(dir);
    const std::string path = trace_path(dir, trace.meta);
    trace.save(path);

    const wsn::RunMetrics metrics = wsn::RunMetrics::from_trace(trace);
    std::cout << "trace=" << path << '\n' << metrics.to_kv();

    if (verify) {
        const wsn::OracleReport report = wsn::verify_trace(trace);
        std::cout << "verify: " << report.summary() << '\n';
        if (!report.ok()) {
            for (const std::string& v : report.violations) std::cerr << v << '\n';
            return kVerifyFailed;
        }
    }
    return kOk;
}

bool parse_seed_range(const std::string& spec, std::uint64_t& lo, std::uint64_t& hi) {
    const std::size_t sep = spec.find("..");
    try {
        if (sep == std::string::npos) {
            lo = hi = std::stoull(spec);
            return true;
        }
        lo = std::stoull(spec.substr(0, sep));
        hi = std::stoull(spec.substr(sep + 2));
    } catch (const std::exception&) {
        return false;
    }
    return lo <= hi;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds_spec,
              const std::string& out_opt) {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    if (!parse_seed_range(seeds_spec, lo, hi)) {
        std::cerr << "bad --seeds range '" << seeds_spec << "', want a..b\n";
        return kConfigError;
    }
    const wsn::ScenarioConfig base = wsn::ScenarioConfig::load(config_path);

    struct SeedResult {
        wsn::RunMetrics on;
        wsn::RunMetrics off;
    };
    std::vector<std::future<SeedResult>> jobs;
    for (std::uint64_t seed = lo; seed <= hi; ++seed) {
        jobs.push_back(std::async(std::launch::async, [&base, seed]() {
            wsn::ScenarioConfig on = base;
            on.seed = seed;
            on.detection_enabled = true;
            wsn::ScenarioConfig off = base;
            off.seed = seed;
            off.detection_enabled = false;
            return SeedResult{wsn::RunMetrics::from_trace(simulate(std::move(on))),
                              wsn::RunMetrics::from_trace(simulate(std::move(off)))};
        }));
    }

    std::ostringstream csv;
    csv << wsn::RunMetrics::csv_header() << '\n';
    std::uint64_t pairs = 0;
    std::uint64_t improved = 0;
    double gain_sum = 0.0;
    for (auto& job : jobs) {
        const SeedResult r = job.get();
        csv << r.on.csv_row() << '\n' << r.off.csv_row() << '\n';
        const wsn::PairComparison cmp = wsn::compare_runs(r.on, r.off);
        ++pairs;
        if (cmp.lifetime_gain > 0) ++improved;
        gain_sum += static_cast<double>(cmp.lifetime_gain);
    }

    if (out_opt.empty()) {
        std::cout << csv.str();
    } else {
        std::filesystem::create_directories(std::filesystem::path(out_opt));
        const std::string path = out_opt + "/" + base.scenario + "_sweep.csv";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << csv.str();
        std::cout << "csv=" << path << '\n';
    }
    std::cerr << "pairs=" << pairs << " improved=" << improved
              << " mean_lifetime_gain=" << (pairs ? gain_sum / static_cast<double>(pairs) : 0.0)
              << '\n';
    return kOk;
}

int cmd_verify(const std::string& path) {
    const wsn::TraceLog trace = wsn::TraceLog::load(path);
    const wsn::OracleReport report = wsn::verify_trace(trace);
    std::cout << report.summary() << '\n';
    if (!report.ok()) {
        for (const std::string& v : report.violations) std::cerr << v << '\n';
        return kVerifyFailed;
    }
    return kOk;
}

int cmd_validate(const std::string& path) {
    std::vector<std::string> defaults;
    const wsn::ScenarioConfig cfg = wsn::ScenarioConfig::load(path, &defaults);
    const std::vector<wsn::NodeSpec> nodes = wsn::materialize_nodes(cfg);
    std::cout << "ok scenario=" << cfg.scenario << " nodes=" << nodes.size()
              << " classes=" << cfg.classes.size() << " plans=" << cfg.attacks.size() << '\n';
    for (const std::string& d : defaults) std::cout << "default: " << d << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic sensor-network simulator with sleep-deprivation detection"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string seeds_spec = "0..0";
    std::string trace_file;
    bool no_detection = false;
    bool verify_after = false;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "run one scenario and write its trace");
    run->add_option("config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (default: $WSNSIM_OUT or '.')");
    run->add_flag("--no-detection", no_detection, "disable the detection pipeline");
    run->add_flag("--verify", verify_after, "replay-check the produced trace");
    run->add_option("--seed", seed, "override the config seed");

    CLI::App* sweep = app.add_subcommand("sweep", "paired detection on/off runs over a seed range");
    sweep->add_option("config", config_path, "scenario config file")->required();
    sweep->add_option("--seeds", seeds_spec, "seed range a..b (inclusive)");
    sweep->add_option("--out", out_dir, "write the CSV here instead of stdout");

    CLI::App* verify = app.add_subcommand("verify", "replay-check an existing trace file");
    verify->add_option("trace", trace_file, "trace file")->required();

    CLI::App* validate = app.add_subcommand("validate", "parse a config and report applied defaults");
    validate->add_option("config", config_path, "scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, no_detection, verify_after, seed);
        if (sweep->parsed()) return cmd_sweep(config_path, seeds_spec, out_dir);
        if (verify->parsed()) return cmd_verify(trace_file);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const wsn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
