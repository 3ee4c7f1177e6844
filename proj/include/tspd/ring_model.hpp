#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tspd/geometry.hpp"

namespace tspd
{
    // One launch-to-landing segment.  `start` and `end` are combined nodes;
    // the truck drives start -> truck... -> end while the drone (if any) flies
    // start -> drone -> end.
    struct Ring
    {
        std::size_t start = 0;
        std::size_t end = 0;
        std::vector<std::size_t> truck;
        std::optional<std::size_t> drone;

        bool is_straight() const noexcept { return truck.empty() && !drone; }

        friend bool operator==(const Ring &, const Ring &) = default;
    };

    // A closed chain of rings: rings[i].end == rings[i+1].start and the last
    // ring ends where the first starts.  A single ring may start and end at
    // the same node (the whole tour is one sortie).
    struct TspdSolution
    {
        std::vector<Ring> rings;
        std::size_t instance_n = 0;
    };

    enum class ViolationKind
    {
        index,
        chaining,
        coverage,
        duplicate,
        role,
    };

    std::string_view to_string(ViolationKind kind);

    struct Violation
    {
        ViolationKind kind;
        std::optional<std::size_t> node;
        std::string message;
    };

    double truck_path_length(const Ring &r, const Instance &inst, const MetricPair &m);

    double ring_cost(const Ring &r, const Instance &inst, const MetricPair &m);

    // All violations found; empty means the solution is well formed.
    std::vector<Violation> validate(const TspdSolution &s, const Instance &inst);

    // Throws ValidationError listing every violation when validate() fails.
    double makespan(const TspdSolution &s, const Instance &inst, const MetricPair &m);

    // Merges every straight ring into a neighbour without increasing the makespan.
    TspdSolution normalize_no_straight(const TspdSolution &s, const Instance &inst, const MetricPair &m);

    std::size_t count_straight(const TspdSolution &s);

    // Combined, truck-only and drone-only node counts.
    struct RoleCounts
    {
        std::size_t combined = 0;
        std::size_t truck = 0;
        std::size_t drone = 0;
    };

    RoleCounts role_counts(const TspdSolution &s);
}
