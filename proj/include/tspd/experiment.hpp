#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tspd/geometry.hpp"
#include "tspd/solvers.hpp"
#include "tspd/strip_bound.hpp"

namespace tspd
{
    inline constexpr const char *kToolVersion = TSPD_VERSION;

    struct ExperimentConfig
    {
        std::vector<double> alphas{1.0, 1.5, 2.0, 2.5, 3.0};
        std::vector<std::size_t> sizes{50, 200, 1000};
        std::size_t instances_per_cell = 30;
        std::size_t samples = 2'000'000;
        std::uint64_t seed = 1;
        TruckNorm metric = TruckNorm::euclidean;
        std::string output_path;
        // 0 = hardware concurrency; never changes results
        std::size_t workers = 0;

        std::vector<PatternKind> patterns{PatternKind::straight, PatternKind::triangle, PatternKind::quartet,
                                          PatternKind::five};
        HSearch h_search{};
        HeuristicConfig heuristic{};
    };

    // Throws ParameterError when an invariant is violated.
    void validate(const ExperimentConfig &cfg);

    // Echo of every field that influences results (workers and output path excluded).
    nlohmann::json to_json(const ExperimentConfig &cfg);

    struct UpperRow
    {
        PatternKind pattern;
        double alpha = 0.0;
        double h = 0.0;
        double mean = 0.0;
        double std_error = 0.0;
        bool boundary = false;

        // mean rounded to 4 decimals
        double bound() const;
    };

    struct EmpiricalRow
    {
        std::size_t n = 0;
        double alpha = 0.0;
        std::size_t instances = 0;
        double mean = 0.0;
        double std_error = 0.0;
        // seconds summed over the cell's solves; reported as metadata only
        double elapsed = 0.0;
    };

    struct LowerRow
    {
        double beta = 0.0;
        double alpha = 0.0;
        double rho_star = 0.0;
        // lb_param truncated to 4 decimals
        double bound = 0.0;
        // lb_ratio truncated to 4 decimals
        double ratio_bound = 0.0;
    };

    // Rows in pattern-major order.  Rectilinear metric throws UnsupportedFeature.
    std::vector<UpperRow> run_upper_table(const ExperimentConfig &cfg);

    // Rows in size-major order.  Instance i of size n is the same point set for every alpha.
    std::vector<EmpiricalRow> run_empirical_table(const ExperimentConfig &cfg);

    // Rows in beta-major order.
    std::vector<LowerRow> run_lower_table(const ExperimentConfig &cfg, const std::vector<double> &betas);

    nlohmann::json to_json(const std::vector<UpperRow> &rows);
    nlohmann::json to_json(const std::vector<EmpiricalRow> &rows);
    nlohmann::json to_json(const std::vector<LowerRow> &rows);

    /*
     * CSV layouts (one header row, comma separated, '\n' line ends):
     *   upper:     pattern,alpha,h,bound,stderr        h %.4f, bound %.4f (rounded), stderr %.6f
     *   empirical: n,alpha,instances,mean,stderr       mean %.4f (rounded), stderr %.6f
     *   lower:     beta,alpha,rho_star,bound,ratio     rho_star %.6f, bound and ratio %.4f (truncated)
     * alpha and beta use the shortest round-trip representation.
     */
    std::string to_csv(const std::vector<UpperRow> &rows);
    std::string to_csv(const std::vector<EmpiricalRow> &rows);
    std::string to_csv(const std::vector<LowerRow> &rows);

    // Per-cell elapsed seconds of an empirical table, keyed "n=<n>,alpha=<a>".
    nlohmann::json timings(const std::vector<EmpiricalRow> &rows);

    struct RunMetadata
    {
        std::optional<std::uint64_t> seed;
        nlohmann::json config = nlohmann::json::object();
        nlohmann::json timings = nlohmann::json::object();
        double wall_clock = 0.0;
    };

    // {"metadata": {tool_version, generator, seed, wall_clock, timings, config}, "result": result}
    nlohmann::json make_report(const RunMetadata &meta, const nlohmann::json &result);

    // Writes the report as indented JSON.  Throws IoError with the path.
    void report_run(const std::string &path, const nlohmann::json &report);

    // Solution file layout plus method, seed, elapsed seconds and the heuristic trace.
    nlohmann::json to_json(const SolveReport &report, const MetricPair &m);

    // Writes text verbatim.  Throws IoError with the path.
    void write_text(const std::string &path, const std::string &text);

    // Shortest decimal that parses back to the same double.
    std::string format_number(double x);
}
