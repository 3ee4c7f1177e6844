#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tspd/errors.hpp"
#include "tspd/experiment.hpp"
#include "tspd/geometry.hpp"
#include "tspd/lower_bound.hpp"
#include "tspd/solvers.hpp"
#include "tspd/strip_bound.hpp"

using nlohmann::json;

namespace
{
    // Exit codes: 0 ok, 2 bad arguments or parameters, 3 unsupported, 4 IO, 5 validation, 1 anything else.
    int emit_error(const std::string &type, const std::string &message, int code,
                   const std::optional<std::string> &path = std::nullopt)
    {
        json err = {{"type", type}, {"message", message}};
        if (path)
        {
            err["path"] = *path;
        }
        std::cerr << json{{"error", err}}.dump() << '\n';
        return code;
    }

    struct Output
    {
        std::string format = "json";
        std::string out_path;
        std::size_t threads = 0;

        void emit(const json &payload, const std::string &csv) const
        {
            const std::string text = format == "csv" ? csv : payload.dump(2) + '\n';
            if (out_path.empty())
            {
                std::cout << text;
            }
            else
            {
                tspd::write_text(out_path, text);
            }
        }
    };

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::string csv_line(const std::vector<std::string> &cells)
    {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); i++)
        {
            out += (i ? "," : "") + cells[i];
        }
        return out + '\n';
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Bounds and solvers for the traveling salesman problem with drone"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tspd::kToolVersion));

    Output output;
    auto add_output = [&](CLI::App *cmd) {
        cmd->add_option("--format", output.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", output.out_path, "Write output to this file instead of stdout");
        cmd->add_option("--threads", output.threads, "Worker threads (0 = all cores); results do not depend on it");
    };

    // upper-bound
    auto *upper = app.add_subcommand("upper-bound", "Monte Carlo strip upper bound for one pattern");
    std::string pattern = "straight";
    double alpha = 1.0;
    std::size_t samples = 2'000'000;
    std::uint64_t seed = 1;
    std::optional<double> fixed_h;
    bool optimize = false;
    tspd::HSearch search;
    std::string metric = "euclidean";
    upper->add_option("--pattern", pattern, "straight|triangle|quartet|five")->required();
    upper->add_option("--alpha", alpha, "Drone speed ratio (>= 1)")->required();
    upper->add_option("--samples", samples, "Number of sampled blocks");
    upper->add_option("--seed", seed, "Random seed");
    upper->set_help_flag("--help", "Print this help message and exit");
    auto *h_opt = upper->add_option("--h", fixed_h, "Scaled strip height");
    auto *opt_flag = upper->add_flag("--optimize-h", optimize, "Minimise over h by golden-section search");
    h_opt->excludes(opt_flag);
    upper->add_option("--h-lo", search.h_lo, "Lower end of the h bracket");
    upper->add_option("--h-hi", search.h_hi, "Upper end of the h bracket");
    upper->add_option("--metric", metric, "euclidean|mixed");
    add_output(upper);

    // lower-bound
    auto *lower = app.add_subcommand("lower-bound", "Closed-form lower bound from a TSP constant");
    std::optional<double> beta;
    std::string preset;
    bool ratio = false;
    auto *beta_opt = lower->add_option("--beta", beta, "TSP constant beta");
    auto *preset_opt = lower->add_option("--preset", preset, "gaudio|empirical_l2|nn_l1|empirical_l1");
    beta_opt->excludes(preset_opt);
    lower->add_option("--alpha", alpha, "Drone speed ratio (>= 1)")->required();
    lower->add_flag("--ratio", ratio, "Use beta / (1 + alpha) instead of the parametric bound");
    add_output(lower);

    // nn-check
    auto *nn = app.add_subcommand("nn-check", "Compare sampled nearest-neighbour distances with the closed forms");
    std::string norm_name = "l2";
    double intensity = 1.0;
    std::size_t trials = 100'000;
    nn->add_option("--norm", norm_name, "l1|l2");
    nn->add_option("--intensity", intensity, "Poisson intensity n");
    nn->add_option("--trials", trials, "Number of trials (>= 100)");
    nn->add_option("--seed", seed, "Random seed");
    add_output(nn);

    // solve
    auto *solve = app.add_subcommand("solve", "Solve one TSPD instance");
    std::string instance_path;
    std::string method = "heuristic";
    std::size_t max_ring = tspd::HeuristicConfig{}.max_ring;
    std::optional<std::uint64_t> solve_seed;
    solve->add_option("--instance", instance_path, "Instance JSON file")->required();
    solve->add_option("--alpha", alpha, "Drone speed ratio (>= 1)")->required();
    solve->add_option("--metric", metric, "euclidean|mixed");
    solve->add_option("--method", method, "exact|heuristic")->check(CLI::IsMember({"exact", "heuristic"}));
    solve->add_option("--seed", solve_seed, "Heuristic seed");
    solve->add_option("--max-ring", max_ring, "Largest ring (nodes) the heuristic considers");
    add_output(solve);

    // gen
    auto *gen = app.add_subcommand("gen", "Generate a uniform random instance");
    std::size_t n_points = 0;
    std::string gen_out;
    gen->add_option("--n", n_points, "Number of points")->required();
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--out", gen_out, "Instance JSON file")->required();

    // experiment
    auto *experiment = app.add_subcommand("experiment", "Bound and empirical tables");
    experiment->require_subcommand(1);
    tspd::ExperimentConfig cfg;
    std::vector<double> betas;
    std::vector<std::string> presets;
    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--alphas", cfg.alphas, "Drone speed ratios")->delimiter(',');
        cmd->add_option("--seed", cfg.seed, "Random seed");
        cmd->add_option("--metric", metric, "euclidean|mixed");
        add_output(cmd);
    };
    auto *up_table = experiment->add_subcommand("upper-table", "Strip upper bounds over patterns and alphas");
    add_common(up_table);
    std::vector<std::string> pattern_names;
    up_table->add_option("--samples", cfg.samples, "Sampled blocks per pattern");
    up_table->add_option("--patterns", pattern_names, "Subset of straight,triangle,quartet,five")->delimiter(',');
    auto *emp_table = experiment->add_subcommand("empirical-table", "Heuristic makespans over sizes and alphas");
    add_common(emp_table);
    emp_table->add_option("--sizes", cfg.sizes, "Instance sizes")->delimiter(',');
    emp_table->add_option("--instances", cfg.instances_per_cell, "Instances per cell");
    emp_table->add_option("--restarts", cfg.heuristic.restarts, "Heuristic restarts per instance");
    emp_table->add_option("--max-ring", cfg.heuristic.max_ring, "Largest ring the heuristic considers");
    emp_table->add_option("--kick-rate", cfg.heuristic.kick_rate, "Perturbation kicks per run, as a multiple of n");
    emp_table->add_option("--neighbors", cfg.heuristic.neighbors, "Candidate neighbours per node");
    emp_table->add_option("--delta-filter", cfg.heuristic.delta_filter,
                          "Skip moves lengthening the truck tour by more than this many mean edges");
    emp_table->add_option("--patience", cfg.heuristic.patience, "Rounds without improvement before a run stops");
    auto *low_table = experiment->add_subcommand("lower-table", "Parametric lower bounds over betas and alphas");
    add_common(low_table);
    low_table->add_option("--betas", betas, "TSP constants")->delimiter(',');
    low_table->add_option("--presets", presets, "Named TSP constants")->delimiter(',');

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return emit_error("usage", e.what(), 2);
    }

    try
    {
        const auto t0 = std::chrono::steady_clock::now();
        if (*upper)
        {
            const auto p = tspd::parse_pattern(pattern);
            const tspd::MetricPair m(tspd::parse_truck_norm(metric), alpha);
            tspd::BoundEstimate est;
            if (fixed_h)
            {
                est = tspd::estimate_bound(p, m, *fixed_h, samples, seed, output.threads);
            }
            else
            {
                est = tspd::optimize_h(p, m, samples, seed, search, output.threads);
            }
            json payload = {{"pattern", pattern},       {"alpha", est.alpha},     {"h", est.h},
                            {"mean", est.mean},         {"stderr", est.std_error}, {"samples", est.samples},
                            {"seed", est.seed}};
            if (!fixed_h)
            {
                payload["h_on_boundary"] = est.boundary;
            }
            output.emit(payload, csv_line({"pattern", "alpha", "h", "mean", "stderr", "samples", "seed"}) +
                                     csv_line({pattern, tspd::format_number(est.alpha), tspd::format_number(est.h),
                                               tspd::format_number(est.mean), tspd::format_number(est.std_error),
                                               std::to_string(est.samples), std::to_string(est.seed)}));
        }
        else if (*lower)
        {
            if (!beta && preset.empty())
            {
                return emit_error("usage", "one of --beta or --preset is required", 2);
            }
            const double b = beta ? *beta : tspd::beta_preset(preset);
            const double rho = tspd::rho_star(b, alpha);
            const double bound = ratio ? tspd::lb_ratio(b, alpha) : tspd::lb_param(b, alpha);
            json payload = {{"beta", b},
                            {"alpha", alpha},
                            {"rho_star", rho},
                            {"bound", bound},
                            {"bound_truncated", tspd::truncate4(bound)},
                            {"kind", ratio ? "ratio" : "parametric"}};
            output.emit(payload, csv_line({"beta", "alpha", "rho_star", "bound"}) +
                                     csv_line({tspd::format_number(b), tspd::format_number(alpha),
                                               tspd::format_number(rho), tspd::format_number(bound)}));
        }
        else if (*nn)
        {
            const auto norm = tspd::parse_norm_kind(norm_name);
            const auto s = tspd::sample_nn_distances(norm, intensity, trials, seed, output.threads);
            const double e1 = tspd::nn_expectation(norm, 1, intensity);
            const double e2 = tspd::nn_expectation(norm, 2, intensity);
            json payload = {
                {"norm", norm_name},
                {"intensity", intensity},
                {"trials", trials},
                {"seed", seed},
                {"redraws", s.redraws},
                {"nearest", {{"analytic", e1}, {"empirical", s.nearest_mean}, {"stderr", s.nearest_stderr}}},
                {"second", {{"analytic", e2}, {"empirical", s.second_mean}, {"stderr", s.second_stderr}}},
            };
            output.emit(payload, csv_line({"order", "analytic", "empirical", "stderr"}) +
                                     csv_line({"1", tspd::format_number(e1), tspd::format_number(s.nearest_mean),
                                               tspd::format_number(s.nearest_stderr)}) +
                                     csv_line({"2", tspd::format_number(e2), tspd::format_number(s.second_mean),
                                               tspd::format_number(s.second_stderr)}));
        }
        else if (*solve)
        {
            const auto inst = tspd::load_instance(instance_path);
            const tspd::MetricPair m(tspd::parse_truck_norm(metric), alpha);
            tspd::SolveReport report;
            if (method == "exact")
            {
                report = tspd::tspd_exact(inst, m);
            }
            else
            {
                tspd::HeuristicConfig hc;
                hc.max_ring = max_ring;
                report = tspd::tspd_heuristic(inst, m, solve_seed.value_or(inst.seed.value_or(1)), hc);
            }
            const json payload = tspd::to_json(report, m);
            output.emit(payload, csv_line({"n", "alpha", "truck_norm", "method", "rings", "makespan"}) +
                                     csv_line({std::to_string(inst.size()), tspd::format_number(alpha),
                                               std::string(tspd::to_string(m.truck_norm())), method,
                                               std::to_string(report.solution.rings.size()),
                                               tspd::format_number(report.makespan)}));
        }
        else if (*gen)
        {
            tspd::save_instance(tspd::generate_instance(n_points, seed), gen_out);
        }
        else if (*experiment)
        {
            cfg.metric = tspd::parse_truck_norm(metric);
            cfg.workers = output.threads;
            cfg.output_path = output.out_path;
            if (!pattern_names.empty())
            {
                cfg.patterns.clear();
                for (const auto &name : pattern_names)
                {
                    cfg.patterns.push_back(tspd::parse_pattern(name));
                }
            }
            tspd::RunMetadata meta;
            meta.seed = cfg.seed;
            meta.config = tspd::to_json(cfg);
            json result;
            std::string csv;
            if (*up_table)
            {
                const auto rows = tspd::run_upper_table(cfg);
                result = {{"table", "upper"}, {"rows", tspd::to_json(rows)}};
                csv = tspd::to_csv(rows);
            }
            else if (*emp_table)
            {
                const auto rows = tspd::run_empirical_table(cfg);
                result = {{"table", "empirical"}, {"rows", tspd::to_json(rows)}};
                meta.timings = tspd::timings(rows);
                csv = tspd::to_csv(rows);
            }
            else
            {
                for (const auto &name : presets)
                {
                    betas.push_back(tspd::beta_preset(name));
                }
                if (betas.empty())
                {
                    for (const auto &p : tspd::kBetaPresets)
                    {
                        betas.push_back(p.beta);
                    }
                }
                meta.config["betas"] = betas;
                const auto rows = tspd::run_lower_table(cfg, betas);
                result = {{"table", "lower"}, {"rows", tspd::to_json(rows)}};
                csv = tspd::to_csv(rows);
            }
            meta.wall_clock = seconds_since(t0);
            output.emit(tspd::make_report(meta, result), csv);
        }
        return 0;
    }
    catch (const tspd::IoError &e)
    {
        return emit_error("io", e.what(), 4, e.path());
    }
    catch (const tspd::UnsupportedFeature &e)
    {
        return emit_error("unsupported_feature", e.what(), 3);
    }
    catch (const tspd::ValidationError &e)
    {
        return emit_error("validation", e.what(), 5);
    }
    catch (const tspd::SizeError &e)
    {
        return emit_error("size", e.what(), 2);
    }
    catch (const tspd::IndexError &e)
    {
        return emit_error("index", e.what(), 2);
    }
    catch (const tspd::ParameterError &e)
    {
        return emit_error("parameter", e.what(), 2);
    }
    catch (const std::exception &e)
    {
        return emit_error("internal", e.what(), 1);
    }
}
