#ifndef AENBO_COMMANDS_HPP
#define AENBO_COMMANDS_HPP
#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aenbo/benchmarks.hpp"
#include "aenbo/bo.hpp"
#include "aenbo/errors.hpp"
#include "aenbo/experiments.hpp"
#include "aenbo/io.hpp"
#include "aenbo/subprocess.hpp"

namespace aenbo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitAbort = 3;

inline constexpr const char* kManifestName = "manifest.json";

/// Default settings per command. Keys absent here are rejected; an empty
/// default marks a key without one (tune's objective and domain).
inline const std::map<std::string, Settings>& command_defaults() {
    static const std::map<std::string, Settings> table = {
        {"bench",
         {{"function", "branin"},
          {"kernels", "rbf,aenrbf"},
          {"scenario", "none"},
          {"branin_sign", "verbatim"},
          {"reps", "30"},
          {"n", "20"},
          {"initial_points", "5"},
          {"workers", "1"},
          {"seed", "0"},
          {"out", "runs/bench"}}},
        {"tune",
         {{"objective", ""},
          {"domain", ""},
          {"kernel", "aenrbf"},
          {"n", "20"},
          {"initial_points", "5"},
          {"timeout_secs", "600"},
          {"seed", "0"},
          {"out", "runs/tune"}}},
        {"demo1d",
         {{"fraction", "0.1"},
          {"magnitude", "3"},
          {"kernels", "rbf,aenrbf"},
          {"points", "30"},
          {"grid", "200"},
          {"restarts", "3"},
          {"seed", "0"},
          {"out", "runs/demo1d"}}},
        {"convergence",
         {{"function", "branin"},
          {"kernels", "rbf,aenrbf"},
          {"scenario", "none"},
          {"iters", "150"},
          {"initial_points", "5"},
          {"seed", "0"},
          {"out", "runs/convergence"}}},
        {"timing",
         {{"function", "branin"},
          {"kernels", "rbf,aenrbf"},
          {"iters", "40"},
          {"reps", "3"},
          {"sizes", "50,100,200,400"},
          {"growth_repeats", "5"},
          {"seed", "0"},
          {"out", "runs/timing"}}},
        {"mspe",
         {{"setting", "asymmetric"},
          {"trials", "50"},
          {"n_train", "30"},
          {"n_test", "50"},
          {"restarts", "3"},
          {"seed", "0"},
          {"out", "runs/mspe"}}},
        {"validate", {{"grid", "2001"}, {"seed", "0"}, {"out", "runs/validate"}}},
    };
    return table;
}

inline bool is_command(const std::string& command) { return command_defaults().count(command) > 0; }

inline std::set<std::string> allowed_keys(const std::string& command) {
    const auto it = command_defaults().find(command);
    if (it == command_defaults().end()) throw ConfigError("unknown command '" + command + "'");
    std::set<std::string> keys;
    for (const auto& [k, v] : it->second) keys.insert(k);
    return keys;
}

/// Defaults, then the config file, then flags. Every key must be known and
/// every key must end up non-empty.
inline Settings resolve_settings(const std::string& command, const Settings& file, const Settings& flags) {
    const std::set<std::string> keys = allowed_keys(command);
    Settings out = command_defaults().at(command);
    for (const Settings* layer : {&file, &flags})
        for (const auto& [k, v] : *layer) {
            if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' for command " + command);
            out[k] = v;
        }
    for (const auto& [k, v] : out)
        if (v.empty()) throw ConfigError("missing required key '" + k + "' for command " + command);
    return out;
}

namespace detail {

inline std::string cell(double v) { return format_double(v); }

inline std::vector<std::string> point_cells(const Eigen::VectorXd& x, Eigen::Index dim) {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < dim; ++j)
        out.push_back(j < x.size() ? cell(x(j)) : std::string("nan"));
    return out;
}

inline std::vector<std::string> point_header(Eigen::Index dim) {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < dim; ++j) out.push_back("x" + std::to_string(j));
    return out;
}

template <class... Parts>
std::vector<std::string> concat(Parts&&... parts) {
    std::vector<std::string> out;
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json model_json(const GpModel& m) {
    nlohmann::json j;
    j["kernel"] = std::string(to_string(m.kernel.kind));
    j["variance"] = m.kernel.variance;
    j["lengthscale"] = m.kernel.lengthscale;
    if (m.kernel.kind == KernelKind::AenRbf) {
        j["lambda"] = m.kernel.lambda;
        j["alpha"] = m.kernel.alpha;
    }
    j["noise"] = m.noise;
    j["mean_const"] = m.mean_const;
    return j;
}

inline int positive_int(const Settings& s, const std::string& key) {
    const long long v = setting_int(s, key);
    if (v < 1 || v > 1000000000) throw ConfigError("key '" + key + "' must be a positive integer");
    return static_cast<int>(v);
}

/// Output directory plus a manifest that is written before any result and
/// finalized afterwards.
class RunContext {
public:
    RunContext(std::string command, const Settings& settings, std::vector<std::string> artifacts)
        : out_(setting(settings, "out")) {
        manifest_.command = std::move(command);
        manifest_.config = settings;
        manifest_.seed = setting_seed(settings, "seed");
        manifest_.artifacts = std::move(artifacts);
        manifest_.started_at = utc_timestamp();
    }

    nlohmann::json& details() { return manifest_.details; }

    void begin() {
        std::error_code ec;
        std::filesystem::create_directories(out_, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_.string() + ": " + ec.message());
        manifest_.write(out_ / kManifestName);
    }

    void finish() {
        manifest_.finished_at = utc_timestamp();
        manifest_.write(out_ / kManifestName);
    }

    [[nodiscard]] std::filesystem::path file(const std::string& name) const { return out_ / name; }

private:
    std::filesystem::path out_;
    RunManifest manifest_;
};

// Each command parses its settings in a planning step (failures there are
// config errors) and returns the work to run.
using Work = std::function<int(std::ostream&)>;

inline Work plan_bench(const Settings& s) {
    ExperimentConfig cfg;
    cfg.function = parse_function(setting(s, "function"));
    cfg.kernels = parse_kernel_list(setting(s, "kernels"));
    cfg.scenario = parse_scenario(setting(s, "scenario"));
    const std::string sign = setting(s, "branin_sign");
    if (sign != "verbatim" && sign != "negated") throw ConfigError("branin_sign must be 'verbatim' or 'negated'");
    cfg.branin_sign = sign == "verbatim" ? BraninLowerSign::Verbatim : BraninLowerSign::Negated;
    cfg.repetitions = positive_int(s, "reps");
    cfg.evaluations = positive_int(s, "n");
    cfg.bo.initial_points = positive_int(s, "initial_points");
    cfg.bo.evaluations = cfg.evaluations;
    cfg.workers = positive_int(s, "workers");
    cfg.seed = setting_seed(s, "seed");
    cfg.validate();
    cfg.bo.validate();
    const BoxDomain domain = scenario_domain(cfg.function, cfg.scenario, cfg.branin_sign);

    return [s, cfg, domain](std::ostream& log) {
        RunContext ctx("bench", s, {"results.csv", "traces.csv", "summary.json"});
        ctx.details()["function"] = std::string(to_string(cfg.function));
        ctx.details()["scenario"] = std::string(to_string(cfg.scenario));
        ctx.details()["active_domain"] = domain_json(domain);
        ctx.begin();
        log << "[aenbo] bench " << to_string(cfg.function) << " scenario=" << to_string(cfg.scenario)
            << " R=" << cfg.repetitions << " n=" << cfg.evaluations << "\n";
        const ExperimentResult res = run_experiment(cfg);
        const Eigen::Index p = domain.dim();

        CsvWriter results(ctx.file("results.csv"),
                          concat(std::vector<std::string>{"function", "scenario", "kernel", "rep", "seed", "failed", "y_star"},
                                 point_header(p), std::vector<std::string>{"seconds_per_iter"}));
        CsvWriter traces(ctx.file("traces.csv"), {"kernel", "rep", "evaluation", "y_best"});
        nlohmann::json summary;
        summary["function"] = std::string(to_string(res.function));
        summary["scenario"] = std::string(to_string(res.scenario));
        summary["domain"] = domain_json(res.domain);
        summary["y_global"] = res.y_global;
        summary["repetitions"] = cfg.repetitions;
        summary["evaluations"] = cfg.evaluations;
        summary["kernels"] = nlohmann::json::array();
        for (const KernelOutcome& ko : res.kernels) {
            const std::string label = ko.kernel.label();
            for (const RepetitionOutcome& r : ko.reps) {
                results.row(concat(std::vector<std::string>{std::string(to_string(res.function)),
                                                            std::string(to_string(res.scenario)), label,
                                                            std::to_string(r.rep), std::to_string(r.seed),
                                                            r.failed ? "1" : "0", cell(r.y_star)},
                                   point_cells(r.x_star, p), std::vector<std::string>{cell(r.seconds_per_iter)}));
                for (std::size_t i = 0; i < r.trace.size(); ++i)
                    traces.row({label, std::to_string(r.rep), std::to_string(i + 1), cell(r.trace[i])});
            }
            nlohmann::json k;
            k["kernel"] = label;
            k["rmse"] = number_or_null(ko.rmse);
            k["rmse_normalized"] = number_or_null(ko.rmse_normalized);
            k["failures"] = ko.failures;
            k["mean_seconds_per_iter"] = ko.mean_seconds_per_iter;
            summary["kernels"].push_back(k);
            log << "[aenbo]   " << label << ": RMSE " << ko.rmse << " (" << ko.failures << " failed)\n";
        }
        summary["partial"] = res.partial();
        write_json(ctx.file("summary.json"), summary);
        ctx.finish();
        return res.partial() ? kExitPartial : kExitOk;
    };
}

inline Work plan_tune(const Settings& s) {
    const std::string command = setting(s, "objective");
    const BoxDomain domain = parse_domain(setting(s, "domain"));
    const KernelChoice kernel = parse_kernel_choice(setting(s, "kernel"));
    BoConfig cfg = bo_config_for(BoConfig{}, kernel);
    cfg.evaluations = positive_int(s, "n");
    cfg.initial_points = positive_int(s, "initial_points");
    cfg.seed = setting_seed(s, "seed");
    cfg.validate();
    const double timeout = setting_double(s, "timeout_secs");
    if (!(timeout > 0.0)) throw ConfigError("timeout_secs must be positive");

    return [s, command, domain, cfg, timeout](std::ostream& log) {
        RunContext ctx("tune", s, {"history.csv", "summary.json"});
        ctx.details()["active_domain"] = domain_json(domain);
        ctx.begin();
        const Eigen::Index p = domain.dim();
        ExternalObjective objective(command, timeout);
        CsvWriter history(ctx.file("history.csv"),
                          concat(std::vector<std::string>{"evaluation"}, point_header(p),
                                 std::vector<std::string>{"y", "raw_y", "clipped", "y_best", "error"}));
        const auto error_cell = [&](std::size_t i) {
            std::string e = i < objective.errors().size() ? objective.errors()[i] : std::string();
            for (char& c : e)
                if (c == ',' || c == '\n' || c == '"') c = ' ';
            return e;
        };
        nlohmann::json summary;
        summary["objective"] = command;
        summary["domain"] = domain_json(domain);
        summary["kernel"] = std::string(to_string(cfg.kernel.kind));
        try {
            const BoResult r = run_bo(objective, domain, cfg);
            for (std::size_t i = 0; i < r.history.size(); ++i) {
                const BoRecord& rec = r.history.records[i];
                history.row(concat(std::vector<std::string>{std::to_string(i + 1)}, point_cells(rec.x, p),
                                   std::vector<std::string>{cell(rec.y), cell(rec.raw_y), rec.clipped ? "1" : "0",
                                                            cell(rec.y_best), error_cell(i)}));
            }
            summary["x_star"] = std::vector<double>(r.x_best.data(), r.x_best.data() + r.x_best.size());
            summary["y_star"] = r.y_best;
            summary["failures"] = objective.failures();
            summary["aborted"] = false;
            write_json(ctx.file("summary.json"), summary);
            ctx.finish();
            std::cout << "x* =";
            for (Eigen::Index j = 0; j < r.x_best.size(); ++j) std::cout << ' ' << format_double(r.x_best(j));
            std::cout << "\ny* = " << format_double(r.y_best) << "\n";
            return kExitOk;
        } catch (const ExternalAbortError& e) {
            // The loop never saw the failing calls; reconstruct from the objective's log.
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < objective.points().size(); ++i) {
                const double raw = objective.values()[i];
                const bool failed = !objective.errors()[i].empty();
                const double y = failed ? kClippedValue : raw;
                best = std::min(best, y);
                history.row(concat(std::vector<std::string>{std::to_string(i + 1)}, point_cells(objective.points()[i], p),
                                   std::vector<std::string>{cell(y), cell(raw), failed ? "1" : "0", cell(best),
                                                            error_cell(i)}));
            }
            summary["aborted"] = true;
            summary["error"] = e.what();
            summary["failures"] = objective.failures();
            write_json(ctx.file("summary.json"), summary);
            ctx.finish();
            log << "[aenbo] tune aborted: " << e.what() << "\n";
            return kExitAbort;
        }
    };
}

inline Work plan_demo1d(const Settings& s) {
    Demo1dOptions opt;
    opt.fraction = setting_double(s, "fraction");
    opt.magnitude = setting_double(s, "magnitude");
    opt.points = positive_int(s, "points");
    opt.grid = positive_int(s, "grid");
    opt.restarts = positive_int(s, "restarts");
    if (!(opt.fraction >= 0.0 && opt.fraction <= 0.5)) throw ConfigError("fraction must lie in [0, 0.5]");
    const std::vector<KernelChoice> kernels = parse_kernel_list(setting(s, "kernels"));
    const std::uint64_t seed = setting_seed(s, "seed");

    return [s, opt, kernels, seed](std::ostream& log) {
        RunContext ctx("demo1d", s, {"bands.csv", "data.csv", "summary.json"});
        ctx.begin();
        const Demo1dResult res = demo1d(kernels, seed, opt);
        std::vector<std::string> header{"x", "truth"};
        for (const Demo1dBand& b : res.bands)
            for (const char* part : {"_mean", "_lower", "_upper"}) header.push_back(b.kernel.label() + part);
        CsvWriter bands(ctx.file("bands.csv"), header);
        for (Eigen::Index i = 0; i < res.grid.size(); ++i) {
            std::vector<std::string> row{cell(res.grid(i)), cell(res.truth(i))};
            for (const Demo1dBand& b : res.bands) {
                row.push_back(cell(b.mean(i)));
                row.push_back(cell(b.lower(i)));
                row.push_back(cell(b.upper(i)));
            }
            bands.row(row);
        }
        CsvWriter data(ctx.file("data.csv"), {"x", "y", "outlier"});
        std::set<int> outliers(res.outliers.begin(), res.outliers.end());
        for (Eigen::Index i = 0; i < res.data.y.size(); ++i)
            data.row({cell(res.data.X(i, 0)), cell(res.data.y(i)), outliers.count(static_cast<int>(i)) ? "1" : "0"});
        nlohmann::json summary;
        summary["fraction"] = opt.fraction;
        summary["magnitude"] = opt.magnitude;
        summary["outliers"] = res.outliers;
        summary["kernels"] = nlohmann::json::array();
        for (const Demo1dBand& b : res.bands) {
            summary["kernels"].push_back({{"kernel", b.kernel.label()}, {"mean_width", b.mean_width()}, {"model", model_json(b.model)}});
            log << "[aenbo] " << b.kernel.label() << ": mean band width " << b.mean_width() << "\n";
        }
        write_json(ctx.file("summary.json"), summary);
        ctx.finish();
        return kExitOk;
    };
}

inline Work plan_convergence(const Settings& s) {
    const FunctionName function = parse_function(setting(s, "function"));
    const std::vector<KernelChoice> kernels = parse_kernel_list(setting(s, "kernels"));
    const Scenario scenario = parse_scenario(setting(s, "scenario"));
    const int iters = positive_int(s, "iters");
    BoConfig base;
    base.initial_points = positive_int(s, "initial_points");
    if (iters <= base.initial_points) throw ConfigError("iters must exceed initial_points");
    const std::uint64_t seed = setting_seed(s, "seed");

    return [=](std::ostream& log) {
        RunContext ctx("convergence", s, {"trace.csv", "summary.json"});
        ctx.details()["active_domain"] = domain_json(scenario_domain(function, scenario));
        ctx.begin();
        const ConvergenceResult res = convergence_trace(function, kernels, iters, seed, base, scenario);
        std::vector<std::string> header{"iteration"};
        for (const KernelChoice& k : kernels) header.push_back(k.label());
        CsvWriter trace(ctx.file("trace.csv"), header);
        for (int i = 0; i < iters; ++i) {
            std::vector<std::string> row{std::to_string(i + 1)};
            for (const auto& t : res.traces) row.push_back(cell(t[static_cast<std::size_t>(i)]));
            trace.row(row);
        }
        nlohmann::json summary;
        summary["function"] = std::string(to_string(function));
        summary["iterations"] = iters;
        summary["y_global"] = res.y_global;
        summary["kernels"] = nlohmann::json::array();
        for (std::size_t k = 0; k < kernels.size(); ++k) {
            summary["kernels"].push_back({{"kernel", kernels[k].label()}, {"final_gap", res.final_gap[k]}});
            log << "[aenbo] " << kernels[k].label() << ": final gap " << res.final_gap[k] << "\n";
        }
        write_json(ctx.file("summary.json"), summary);
        ctx.finish();
        return kExitOk;
    };
}

inline Work plan_timing(const Settings& s) {
    const FunctionName function = parse_function(setting(s, "function"));
    const std::vector<KernelChoice> kernels = parse_kernel_list(setting(s, "kernels"));
    const int iters = positive_int(s, "iters");
    const int reps = positive_int(s, "reps");
    const std::vector<int> sizes = parse_int_list(setting(s, "sizes"));
    for (int n : sizes)
        if (n < 2) throw ConfigError("sizes must be at least 2");
    if (sizes.size() < 2) throw ConfigError("sizes needs at least two entries");
    const int growth_repeats = positive_int(s, "growth_repeats");
    if (iters <= BoConfig{}.initial_points) throw ConfigError("iters must exceed the initial design size");
    const std::uint64_t seed = setting_seed(s, "seed");

    return [=](std::ostream& log) {
        RunContext ctx("timing", s, {"timing.json"});
        ctx.begin();
        const TimingReport rep = timing_profile(function, kernels, iters, reps, seed, BoConfig{}, sizes, growth_repeats);
        nlohmann::json j;
        j["function"] = std::string(to_string(function));
        j["iterations"] = iters;
        j["repetitions"] = reps;
        j["kernels"] = nlohmann::json::array();
        for (std::size_t k = 0; k < kernels.size(); ++k) {
            j["kernels"].push_back({{"kernel", kernels[k].label()}, {"mean_seconds_per_iter", rep.mean_seconds_per_iter[k]}});
            log << "[aenbo] " << kernels[k].label() << ": " << rep.mean_seconds_per_iter[k] << " s per iteration\n";
        }
        if (kernels.size() >= 2 && rep.mean_seconds_per_iter[0] > 0.0)
            j["seconds_ratio_last_to_first"] = rep.mean_seconds_per_iter.back() / rep.mean_seconds_per_iter.front();
        j["sizes"] = rep.growth.sizes;
        j["factorization_seconds"] = rep.growth.seconds;
        j["growth_exponent"] = rep.growth.exponent;
        log << "[aenbo] factorization growth exponent " << rep.growth.exponent << "\n";
        write_json(ctx.file("timing.json"), j);
        ctx.finish();
        return kExitOk;
    };
}

inline Work plan_mspe(const Settings& s) {
    MspeOptions opt;
    opt.setting = parse_mspe_setting(setting(s, "setting"));
    opt.n_train = positive_int(s, "n_train");
    opt.n_test = positive_int(s, "n_test");
    opt.restarts = positive_int(s, "restarts");
    if (opt.n_train < 2) throw ConfigError("n_train must be at least 2");
    const int trials = positive_int(s, "trials");
    const std::uint64_t seed = setting_seed(s, "seed");

    return [=](std::ostream& log) {
        RunContext ctx("mspe", s, {"mspe.csv", "summary.json"});
        ctx.begin();
        const MspeReport rep = mspe_compare(seed, trials, opt);
        CsvWriter csv(ctx.file("mspe.csv"), {"trial", "seed", "mspe_rbf", "mspe_aenrbf", "aenrbf_wins"});
        for (int t = 0; t < trials; ++t) {
            const auto i = static_cast<std::size_t>(t);
            csv.row({std::to_string(t), std::to_string(seed + i), cell(rep.trial_rbf[i]), cell(rep.trial_aen[i]),
                     rep.trial_aen[i] < rep.trial_rbf[i] ? "1" : "0"});
        }
        nlohmann::json j;
        j["setting"] = std::string(to_string(opt.setting));
        j["trials"] = trials;
        j["mspe_rbf"] = rep.mspe_rbf;
        j["mspe_aenrbf"] = rep.mspe_aen;
        j["win_rate"] = rep.win_rate;
        write_json(ctx.file("summary.json"), j);
        ctx.finish();
        log << "[aenbo] mspe " << to_string(opt.setting) << ": AEN-RBF win rate " << rep.win_rate << "\n";
        return kExitOk;
    };
}

inline Work plan_validate(const Settings& s) {
    const int grid = positive_int(s, "grid");
    if (grid < 2) throw ConfigError("grid must be at least 2");
    return [s, grid](std::ostream& log) {
        RunContext ctx("validate", s, {"validation.json"});
        ctx.begin();
        const ValidationReport rep = validation_report(grid);
        nlohmann::json j;
        j["grid"] = grid;
        j["functions"] = nlohmann::json::array();
        for (const FunctionCheck& f : rep.functions) {
            j["functions"].push_back({{"function", std::string(to_string(f.name))},
                                      {"printed_min", f.printed_min},
                                      {"grid_min", f.grid_min},
                                      {"grid_argmin", {f.grid_argmin(0), f.grid_argmin(1)}},
                                      {"discrepancy", f.grid_min - f.printed_min},
                                      {"matches", f.matches}});
            if (!f.matches)
                log << "[aenbo] " << to_string(f.name) << ": grid minimum " << f.grid_min << " differs from printed "
                    << f.printed_min << "\n";
        }
        j["domains"] = nlohmann::json::array();
        for (const DomainCheck& d : rep.domains) {
            j["domains"].push_back({{"function", std::string(to_string(d.name))},
                                    {"scenario", std::string(to_string(d.scenario))},
                                    {"printed", domain_json(d.printed)},
                                    {"rule", domain_json(d.rule)},
                                    {"encloses_nominal", d.encloses_nominal},
                                    {"max_deviation_from_rule", d.max_deviation_from_rule}});
        }
        write_json(ctx.file("validation.json"), j);
        ctx.finish();
        return kExitOk;
    };
}

inline Work plan(const std::string& command, const Settings& s) {
    if (command == "bench") return plan_bench(s);
    if (command == "tune") return plan_tune(s);
    if (command == "demo1d") return plan_demo1d(s);
    if (command == "convergence") return plan_convergence(s);
    if (command == "timing") return plan_timing(s);
    if (command == "mspe") return plan_mspe(s);
    if (command == "validate") return plan_validate(s);
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace detail

/// Runs a command on fully resolved settings and maps failures to exit codes.
inline int run_command(const std::string& command, const Settings& settings, std::ostream& log = std::cerr) {
    detail::Work work;
    try {
        const Settings resolved = resolve_settings(command, {}, settings);
        work = detail::plan(command, resolved);
    } catch (const Error& e) {
        log << "[aenbo] config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        return work(log);
    } catch (const ExternalAbortError& e) {
        log << "[aenbo] external objective abort: " << e.what() << "\n";
        return kExitAbort;
    } catch (const ConfigError& e) {
        log << "[aenbo] config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "[aenbo] run failed: " << e.what() << "\n";
        return kExitPartial;
    }
}

/// Runs the command and config recorded in a manifest. `out` replaces the
/// recorded output directory when non-empty.
inline int rerun_manifest(const std::filesystem::path& manifest_path, const std::string& out, std::ostream& log = std::cerr) {
    RunManifest m;
    try {
        m = RunManifest::read(manifest_path);
    } catch (const Error& e) {
        log << "[aenbo] config error: " << e.what() << "\n";
        return kExitConfig;
    }
    Settings s = m.config;
    if (!out.empty()) s["out"] = out;
    return run_command(m.command, s, log);
}

} // namespace aenbo

#endif // AENBO_COMMANDS_HPP
