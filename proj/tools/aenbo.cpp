#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aenbo/commands.hpp"

namespace {

struct Flag {
    std::string name;
    std::string key;
    std::string help;
};

const std::map<std::string, std::vector<Flag>>& command_flags() {
    static const std::map<std::string, std::vector<Flag>> table = {
        {"bench",
         {{"--function", "function", "mccormick, sixhumpcamel, rosenbrock or branin"},
          {"--kernels,--kernel", "kernels", "comma-separated kernels, e.g. rbf,aenrbf:lambda=0.5"},
          {"--scenario", "scenario", "none, widen5, widen10, widen5-rule or widen10-rule"},
          {"--branin-sign", "branin_sign", "verbatim or negated"},
          {"--reps", "reps", "repetitions per kernel"},
          {"--n", "n", "evaluations per run, initial design included"},
          {"--initial-points", "initial_points", "Latin hypercube design size"},
          {"--workers", "workers", "threads over repetitions"}}},
        {"tune",
         {{"--objective", "objective", "shell command reading {\"x\":[..]} and printing one number"},
          {"--domain", "domain", "box as lo:hi,lo:hi,..."},
          {"--kernel", "kernel", "surrogate kernel"},
          {"--n", "n", "evaluation budget, initial design included"},
          {"--initial-points", "initial_points", "Latin hypercube design size"},
          {"--timeout-secs", "timeout_secs", "per-evaluation timeout"}}},
        {"demo1d",
         {{"--fraction", "fraction", "share of outlying observations in [0, 0.5]"},
          {"--magnitude", "magnitude", "outlier offset in units of the response sd"},
          {"--kernels,--kernel", "kernels", "comma-separated kernels"},
          {"--n,--points", "points", "observations"},
          {"--grid", "grid", "prediction grid size"},
          {"--restarts", "restarts", "likelihood restarts"}}},
        {"convergence",
         {{"--function", "function", "benchmark function"},
          {"--kernels,--kernel", "kernels", "comma-separated kernels"},
          {"--scenario", "scenario", "domain scenario"},
          {"--n,--iters", "iters", "evaluations per run"},
          {"--initial-points", "initial_points", "Latin hypercube design size"}}},
        {"timing",
         {{"--function", "function", "benchmark function"},
          {"--kernels,--kernel", "kernels", "comma-separated kernels"},
          {"--n,--iters", "iters", "evaluations per run"},
          {"--reps", "reps", "runs per kernel"},
          {"--sizes", "sizes", "matrix sizes for the factorization growth fit"},
          {"--growth-repeats", "growth_repeats", "timings per size (median taken)"}}},
        {"mspe",
         {{"--setting", "setting", "symmetric or asymmetric"},
          {"--reps,--trials", "trials", "trials"},
          {"--n,--n-train", "n_train", "training points per trial"},
          {"--n-test", "n_test", "test points per trial"},
          {"--restarts", "restarts", "likelihood restarts"}}},
        {"validate", {{"--grid", "grid", "grid nodes per axis"}}},
    };
    return table;
}

const std::map<std::string, std::string>& command_help() {
    static const std::map<std::string, std::string> table = {
        {"bench", "Repeated BO runs on a benchmark function; RMSE of the final best values"},
        {"tune", "Minimize an external objective command"},
        {"demo1d", "Posterior bands on 1-D data with injected outliers"},
        {"convergence", "Best-so-far traces of single BO runs"},
        {"timing", "Per-iteration time and factorization growth"},
        {"mspe", "Held-out prediction error, AEN-RBF against RBF"},
        {"validate", "Grid check of benchmark minima and widened domains"},
    };
    return table;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimization with GP surrogates and the AEN-RBF kernel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aenbo::kVersion));

    std::map<std::string, aenbo::Settings> flags;
    std::map<std::string, std::string> config_paths;
    for (const auto& [name, list] : command_flags()) {
        CLI::App* sub = app.add_subcommand(name, command_help().at(name));
        sub->add_option("--config", config_paths[name], "key = value config file");
        aenbo::Settings& target = flags[name];
        sub->add_option_function<std::string>("--seed", [&target](const std::string& v) { target["seed"] = v; },
                                              "base seed");
        sub->add_option_function<std::string>("--out", [&target](const std::string& v) { target["out"] = v; },
                                              "output directory");
        for (const Flag& f : list) {
            const std::string key = f.key;
            sub->add_option_function<std::string>(f.name, [&target, key](const std::string& v) { target[key] = v; },
                                                  f.help);
        }
    }

    std::string manifest_path;
    std::string rerun_out;
    CLI::App* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
    rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    rerun->add_option("--out", rerun_out, "output directory (defaults to the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? aenbo::kExitOk : aenbo::kExitConfig;
    }

    if (rerun->parsed()) return aenbo::rerun_manifest(manifest_path, rerun_out);

    for (const auto& [name, list] : command_flags()) {
        if (!app.got_subcommand(name)) continue;
        try {
            aenbo::Settings file;
            if (!config_paths[name].empty()) file = aenbo::parse_config_file(config_paths[name], aenbo::allowed_keys(name));
            return aenbo::run_command(name, aenbo::resolve_settings(name, file, flags[name]));
        } catch (const aenbo::Error& e) {
            std::cerr << "[aenbo] config error: " << e.what() << "\n";
            return aenbo::kExitConfig;
        }
    }
    return aenbo::kExitConfig;
}
