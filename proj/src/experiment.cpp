#include "tspd/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tspd/errors.hpp"
#include "tspd/lower_bound.hpp"
#include "tspd/parallel.hpp"
#include "tspd/rng.hpp"
#include "tspd/stats.hpp"

namespace tspd
{
    namespace
    {
        std::string fixed(double x, int decimals)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
            return buf;
        }

        // stream keys for the per-cell seeds
        constexpr std::uint64_t kUpperKey = 0x7570;
        constexpr std::uint64_t kInstanceKey = 0x696e;
        constexpr std::uint64_t kSolveKey = 0x736f;
    }

    std::string format_number(double x)
    {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }

    void validate(const ExperimentConfig &cfg)
    {
        for (double a : cfg.alphas)
        {
            if (!(a >= 1.0) || !std::isfinite(a))
            {
                throw ParameterError("every alpha must be >= 1");
            }
        }
        for (auto n : cfg.sizes)
        {
            if (n < 2)
            {
                throw ParameterError("every instance size must be >= 2");
            }
        }
        if (cfg.alphas.empty())
        {
            throw ParameterError("at least one alpha is required");
        }
        if (cfg.instances_per_cell < 1 || cfg.samples < 1)
        {
            throw ParameterError("instances_per_cell and samples must be >= 1");
        }
    }

    nlohmann::json to_json(const ExperimentConfig &cfg)
    {
        nlohmann::json patterns = nlohmann::json::array();
        for (auto p : cfg.patterns)
        {
            patterns.push_back(std::string(to_string(p)));
        }
        const auto &h = cfg.heuristic;
        return {
            {"alphas", cfg.alphas},
            {"sizes", cfg.sizes},
            {"instances_per_cell", cfg.instances_per_cell},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"metric", std::string(to_string(cfg.metric))},
            {"patterns", patterns},
            {"h_search", {{"h_lo", cfg.h_search.h_lo}, {"h_hi", cfg.h_search.h_hi}, {"tolerance", cfg.h_search.tolerance}}},
            {"heuristic",
             {{"restarts", h.restarts},
              {"patience", h.patience},
              {"max_ring", h.max_ring},
              {"or_opt_max", h.or_opt_max},
              {"neighbors", h.neighbors},
              {"move_window", h.move_window},
              {"kick_rate", h.kick_rate},
              {"delta_filter", h.delta_filter}}},
        };
    }

    double UpperRow::bound() const
    {
        return round4(mean);
    }

    std::vector<UpperRow> run_upper_table(const ExperimentConfig &cfg)
    {
        validate(cfg);
        if (cfg.metric != TruckNorm::euclidean)
        {
            throw UnsupportedFeature("upper-bound tables are only available for the Euclidean truck norm");
        }
        std::vector<UpperRow> rows;
        for (auto p : cfg.patterns)
        {
            // one block draw per pattern, shared by every alpha
            const BlockSet blocks(p, cfg.samples, derive_seed(cfg.seed, {kUpperKey, block_size(p)}), cfg.workers);
            for (double alpha : cfg.alphas)
            {
                const auto est = optimize_h(blocks, MetricPair(TruckNorm::euclidean, alpha), cfg.h_search, cfg.workers);
                rows.push_back({p, alpha, est.h, est.mean, est.std_error, est.boundary});
            }
        }
        return rows;
    }

    std::vector<EmpiricalRow> run_empirical_table(const ExperimentConfig &cfg)
    {
        validate(cfg);
        const std::size_t n_alpha = cfg.alphas.size();
        const std::size_t per_cell = cfg.instances_per_cell;
        const std::size_t cells = cfg.sizes.size() * n_alpha;

        struct Outcome
        {
            double scaled = 0.0;
            double elapsed = 0.0;
        };
        std::vector<Outcome> outcomes(cells * per_cell);
        parallel_for(outcomes.size(), cfg.workers, [&](std::size_t task) {
            const std::size_t cell = task / per_cell;
            const std::size_t inst_index = task % per_cell;
            const std::size_t n = cfg.sizes[cell / n_alpha];
            const std::size_t a = cell % n_alpha;
            const Instance inst = generate_instance(n, derive_seed(cfg.seed, {kInstanceKey, n, inst_index}));
            const MetricPair m(cfg.metric, cfg.alphas[a]);
            const auto report = tspd_heuristic(inst, m, derive_seed(cfg.seed, {kSolveKey, n, a, inst_index}),
                                               cfg.heuristic);
            outcomes[task] = {scaled_makespan(report, n), report.elapsed};
        });

        std::vector<EmpiricalRow> rows;
        rows.reserve(cells);
        for (std::size_t cell = 0; cell < cells; cell++)
        {
            RunningStats acc;
            double elapsed = 0.0;
            for (std::size_t i = 0; i < per_cell; i++)
            {
                acc.add(outcomes[cell * per_cell + i].scaled);
                elapsed += outcomes[cell * per_cell + i].elapsed;
            }
            EmpiricalRow row;
            row.n = cfg.sizes[cell / n_alpha];
            row.alpha = cfg.alphas[cell % n_alpha];
            row.instances = per_cell;
            row.mean = acc.mean();
            row.std_error = per_cell > 1 ? acc.stderr_of_mean() : 0.0;
            row.elapsed = elapsed;
            rows.push_back(row);
        }
        return rows;
    }

    std::vector<LowerRow> run_lower_table(const ExperimentConfig &cfg, const std::vector<double> &betas)
    {
        validate(cfg);
        if (betas.empty())
        {
            throw ParameterError("at least one beta is required");
        }
        std::vector<LowerRow> rows;
        for (double beta : betas)
        {
            if (!(beta > 0.0))
            {
                throw ParameterError("every beta must be positive");
            }
            for (double alpha : cfg.alphas)
            {
                rows.push_back({beta, alpha, rho_star(beta, alpha), truncate4(lb_param(beta, alpha)),
                                truncate4(lb_ratio(beta, alpha))});
            }
        }
        return rows;
    }

    nlohmann::json to_json(const std::vector<UpperRow> &rows)
    {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &r : rows)
        {
            out.push_back({{"pattern", std::string(to_string(r.pattern))},
                           {"alpha", r.alpha},
                           {"h", r.h},
                           {"bound", r.bound()},
                           {"mean", r.mean},
                           {"stderr", r.std_error},
                           {"h_on_boundary", r.boundary}});
        }
        return out;
    }

    nlohmann::json to_json(const std::vector<EmpiricalRow> &rows)
    {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &r : rows)
        {
            out.push_back({{"n", r.n},
                           {"alpha", r.alpha},
                           {"instances", r.instances},
                           {"mean", r.mean},
                           {"stderr", r.std_error}});
        }
        return out;
    }

    nlohmann::json to_json(const std::vector<LowerRow> &rows)
    {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &r : rows)
        {
            out.push_back({{"beta", r.beta},
                           {"alpha", r.alpha},
                           {"rho_star", r.rho_star},
                           {"bound", r.bound},
                           {"ratio_bound", r.ratio_bound}});
        }
        return out;
    }

    std::string to_csv(const std::vector<UpperRow> &rows)
    {
        std::string out = "pattern,alpha,h,bound,stderr\n";
        for (const auto &r : rows)
        {
            out += std::string(to_string(r.pattern)) + ',' + format_number(r.alpha) + ',' + fixed(r.h, 4) + ',' +
                   fixed(r.bound(), 4) + ',' + fixed(r.std_error, 6) + '\n';
        }
        return out;
    }

    std::string to_csv(const std::vector<EmpiricalRow> &rows)
    {
        std::string out = "n,alpha,instances,mean,stderr\n";
        for (const auto &r : rows)
        {
            out += std::to_string(r.n) + ',' + format_number(r.alpha) + ',' + std::to_string(r.instances) + ',' +
                   fixed(round4(r.mean), 4) + ',' + fixed(r.std_error, 6) + '\n';
        }
        return out;
    }

    std::string to_csv(const std::vector<LowerRow> &rows)
    {
        std::string out = "beta,alpha,rho_star,bound,ratio\n";
        for (const auto &r : rows)
        {
            out += format_number(r.beta) + ',' + format_number(r.alpha) + ',' + fixed(r.rho_star, 6) + ',' +
                   fixed(r.bound, 4) + ',' + fixed(r.ratio_bound, 4) + '\n';
        }
        return out;
    }

    nlohmann::json timings(const std::vector<EmpiricalRow> &rows)
    {
        nlohmann::json out = nlohmann::json::object();
        for (const auto &r : rows)
        {
            out["n=" + std::to_string(r.n) + ",alpha=" + format_number(r.alpha)] = r.elapsed;
        }
        return out;
    }

    nlohmann::json make_report(const RunMetadata &meta, const nlohmann::json &result)
    {
        nlohmann::json metadata = {
            {"tool_version", kToolVersion},
            {"generator", std::string(kGeneratorId)},
            {"seed", meta.seed ? nlohmann::json(*meta.seed) : nlohmann::json(nullptr)},
            {"wall_clock", meta.wall_clock},
            {"timings", meta.timings},
            {"config", meta.config},
        };
        return {{"metadata", metadata}, {"result", result}};
    }

    nlohmann::json to_json(const SolveReport &report, const MetricPair &m)
    {
        nlohmann::json rings = nlohmann::json::array();
        for (const auto &r : report.solution.rings)
        {
            rings.push_back({{"start", r.start},
                             {"truck", r.truck},
                             {"drone", r.drone ? nlohmann::json(*r.drone) : nlohmann::json(nullptr)},
                             {"end", r.end}});
        }
        return {
            {"n", report.solution.instance_n},
            {"alpha", m.alpha()},
            {"truck_norm", std::string(to_string(m.truck_norm()))},
            {"rings", rings},
            {"makespan", report.makespan},
            {"method", std::string(to_string(report.method))},
            {"seed", report.seed ? nlohmann::json(*report.seed) : nlohmann::json(nullptr)},
            {"elapsed", report.elapsed},
            {"trace", report.trace},
        };
    }

    void write_text(const std::string &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw IoError(path, "cannot open for writing");
        }
        out << text;
        out.flush();
        if (!out)
        {
            throw IoError(path, "write failed");
        }
    }

    void report_run(const std::string &path, const nlohmann::json &report)
    {
        write_text(path, report.dump(2) + '\n');
    }
}
