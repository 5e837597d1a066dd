#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "co4/experiment.hpp"
#include "co4/overload_sim.hpp"
#include "co4/verify.hpp"
#include "co4/version.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::string& out_flag,
                 int parallel) {
    co4::ExperimentConfig cfg = co4::parse_config(config_path);
    if (!out_flag.empty()) {
        cfg.out_dir = out_flag;
    } else if (cfg.out_dir.empty()) {
        const char* env_dir = std::getenv("CO4_OUT_DIR");
        cfg.out_dir = env_dir ? env_dir : "runs";
    }
    const co4::RunReport report = co4::run_grid(cfg, parallel);
    std::printf("wrote %zu trajectories and report.json to %s\n",
                report.episodes.size(), cfg.out_dir.c_str());
    for (const co4::CellReport& cell : report.cells) {
        std::printf("  gamma=%-6.3g s_r=%-4d s_c=%-4d "
                    "baseline drift %.4f +- %.4f | co4 drift %.4f +- %.4f | "
                    "co4 wins %d/%d\n",
                    cell.gamma, cell.s_r, cell.s_c, cell.baseline_mean_drift,
                    cell.baseline_stddev_drift, cell.co4_mean_drift,
                    cell.co4_stddev_drift, cell.co4_wins, cell.seed_count);
    }
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed,
               bool inject_fault) {
    co4::VerifyOptions opts;
    opts.seed = seed;
    opts.inject_fault = inject_fault;
    const co4::VerifyResult result = co4::verify_suite(suite, opts);
    std::printf("%s: %d checks, %d failures\n", result.suite.c_str(),
                result.checks, result.failures);
    for (const std::string& msg : result.messages) {
        std::printf("  FAIL %s\n", msg.c_str());
    }
    return result.failures == 0 ? 0 : 1;
}

int cmd_ratio(double s_c, double s_r) {
    const co4::OverloadRatio r = co4::overload_ratio(s_c, s_r);
    std::printf("gamma=%.17g\nclassification=%s\n", r.gamma,
                r.synchrony ? "synchrony" : "overload");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"co4sim: coherence-gated attention overload experiments"};
    app.set_version_flag("--version", co4::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int parallel = 1;
    auto* simulate = app.add_subcommand(
        "simulate", "Run the experiment grid from a JSON config");
    simulate->add_option("--config", config_path, "Path to the config file")
        ->required();
    simulate->add_option(
        "--out", out_dir,
        "Output directory (default: config out_dir, then $CO4_OUT_DIR, "
        "then ./runs)");
    simulate->add_option("--parallel", parallel, "Worker thread count")
        ->check(CLI::PositiveNumber);

    std::string suite;
    std::uint64_t seed = 20240801;
    bool inject_fault = false;
    auto* verify =
        app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("--suite", suite, "gradcheck, oracle, or invariants")
        ->required();
    verify->add_option("--seed", seed, "Base seed for the suite");
    verify->add_flag("--inject-fault", inject_fault,
                     "Perturb one precision entry to prove the invariants "
                     "suite can fail");

    double s_c = 0.0, s_r = 0.0;
    auto* ratio = app.add_subcommand(
        "ratio", "Print the mind-reality ratio and its classification");
    ratio->add_option("--sc", s_c, "Coherent-cognition rate")->required();
    ratio->add_option("--sr", s_r, "Observable-reality rate")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path, out_dir, parallel);
        }
        if (verify->parsed()) return cmd_verify(suite, seed, inject_fault);
        if (ratio->parsed()) return cmd_ratio(s_c, s_r);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
