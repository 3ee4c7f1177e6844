#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "tspd/geometry.hpp"
#include "tspd/ring_model.hpp"

namespace tspd
{
    struct Tour
    {
        std::vector<std::size_t> order;
        double length = 0.0;
    };

    double tour_length(const std::vector<std::size_t> &order, const Instance &inst, TruckNorm norm);

    inline constexpr std::size_t kMaxExactTspSize = 15;
    inline constexpr std::size_t kMaxExactTspdSize = 8;

    // Held-Karp over subsets.  2 <= n <= 15.
    Tour tsp_exact(const Instance &inst, TruckNorm norm);

    // Best of `restarts` nearest-neighbour tours from random start nodes, each
    // improved by 2-opt (neighbour lists, don't-look bits) to a local optimum.
    Tour tsp_heuristic(const Instance &inst, TruckNorm norm, std::uint64_t seed, std::size_t restarts);

    // Ring length cap meaning "no cap".
    inline constexpr std::size_t kUnboundedRing = std::numeric_limits<std::size_t>::max();

    struct PartitionResult
    {
        TspdSolution solution;
        double cost = 0.0;
    };

    /*
     * Minimum-makespan split of a fixed cyclic node order into rings.  The
     * order is opened at tour position 0, which becomes a combined node; every
     * ring covers consecutive positions i..j with j - i + 1 <= max_ring nodes,
     * the truck visits the ring's interior in tour order except for at most
     * one drone node.  When the whole order fits in one ring (n >= 3) the
     * single closed ring starting and ending at position 0 is also considered.
     * Ties go to fewer rings, then to no drone, then to the earlier drone position.
     */
    PartitionResult partition_order(const std::vector<std::size_t> &order, const Instance &inst, const MetricPair &m,
                                    std::size_t max_ring, bool allow_straight = true);

    TspdSolution partition_dp(const Tour &tour, const Instance &inst, const MetricPair &m, std::size_t max_ring);

    enum class SolveMethod
    {
        exact,
        heuristic,
    };

    std::string_view to_string(SolveMethod method);

    struct SolveReport
    {
        TspdSolution solution;
        double makespan = 0.0;
        SolveMethod method = SolveMethod::exact;
        double elapsed = 0.0;
        std::optional<std::uint64_t> seed;
        // heuristic only: makespan after the initial partition and after every accepted improvement
        std::vector<double> trace;
    };

    struct ExactOptions
    {
        // false restricts the search to solutions without straight rings
        bool allow_straight = true;
    };

    // Enumerates every node order (up to reversal) and partitions each one
    // without a ring cap.  2 <= n <= 8.
    SolveReport tspd_exact(const Instance &inst, const MetricPair &m, ExactOptions options = {});

    struct HeuristicConfig
    {
        // independent tour-and-improve runs, best kept
        std::size_t restarts = 1;
        // rounds without improvement before a run stops
        std::size_t patience = 20;
        std::size_t max_ring = 8;
        std::size_t or_opt_max = 3;
        std::size_t neighbors = 6;
        // widest block of tour positions a single move may rearrange
        std::size_t move_window = 48;
        // perturbation kicks per run, as a multiple of max(n, 64)
        double kick_rate = 1.0;
        // moves lengthening the truck tour by more than this many mean tour
        // edges are not evaluated (infinity disables the filter)
        double delta_filter = 1.0;
    };

    SolveReport tspd_heuristic(const Instance &inst, const MetricPair &m, std::uint64_t seed,
                               const HeuristicConfig &config = {});

    double scaled_makespan(const SolveReport &report, std::size_t n);
}
