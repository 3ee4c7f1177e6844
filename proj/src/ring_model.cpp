#include "tspd/ring_model.hpp"

#include <sstream>

#include "tspd/errors.hpp"

namespace tspd
{
    std::string_view to_string(ViolationKind kind)
    {
        switch (kind)
        {
        case ViolationKind::index:
            return "index";
        case ViolationKind::chaining:
            return "chaining";
        case ViolationKind::coverage:
            return "coverage";
        case ViolationKind::duplicate:
            return "duplicate";
        case ViolationKind::role:
            return "role";
        }
        return "unknown";
    }

    namespace
    {
        void check_index(std::size_t node, const Instance &inst)
        {
            if (node >= inst.size())
            {
                throw IndexError("node index " + std::to_string(node) + " out of range for instance of size " +
                                 std::to_string(inst.size()));
            }
        }
    }

    double truck_path_length(const Ring &r, const Instance &inst, const MetricPair &m)
    {
        check_index(r.start, inst);
        check_index(r.end, inst);
        double length = 0.0;
        std::size_t prev = r.start;
        for (auto node : r.truck)
        {
            check_index(node, inst);
            length += truck_dist(m, inst.points[prev], inst.points[node]);
            prev = node;
        }
        return length + truck_dist(m, inst.points[prev], inst.points[r.end]);
    }

    double ring_cost(const Ring &r, const Instance &inst, const MetricPair &m)
    {
        const double truck = truck_path_length(r, inst, m);
        if (!r.drone)
        {
            return truck;
        }
        check_index(*r.drone, inst);
        const auto &d = inst.points[*r.drone];
        const double sortie = drone_dist(m, inst.points[r.start], d) + drone_dist(m, d, inst.points[r.end]);
        return std::max(truck, sortie);
    }

    std::vector<Violation> validate(const TspdSolution &s, const Instance &inst)
    {
        std::vector<Violation> out;
        const std::size_t n = inst.size();

        if (s.instance_n != n)
        {
            out.push_back({ViolationKind::coverage, std::nullopt,
                           "solution is for " + std::to_string(s.instance_n) + " nodes, instance has " +
                               std::to_string(n)});
        }

        // A single node (or none) is served without moving.
        if (n <= 1)
        {
            if (!s.rings.empty())
            {
                out.push_back({ViolationKind::coverage, std::nullopt, "instances with n <= 1 take the empty solution"});
            }
            return out;
        }

        bool indices_ok = true;
        auto bad_index = [&](std::size_t ring, std::size_t node) {
            if (node < n)
            {
                return false;
            }
            out.push_back({ViolationKind::index, node,
                           "ring " + std::to_string(ring) + " references node " + std::to_string(node) +
                               " outside 0.." + std::to_string(n - 1)});
            indices_ok = false;
            return true;
        };
        for (std::size_t i = 0; i < s.rings.size(); i++)
        {
            const auto &r = s.rings[i];
            bad_index(i, r.start);
            bad_index(i, r.end);
            for (auto t : r.truck)
            {
                bad_index(i, t);
            }
            if (r.drone)
            {
                bad_index(i, *r.drone);
            }
        }

        for (std::size_t i = 0; i < s.rings.size(); i++)
        {
            const auto &r = s.rings[i];
            const auto &next = s.rings[(i + 1) % s.rings.size()];
            if (r.end != next.start)
            {
                std::ostringstream msg;
                msg << "ring " << i << " ends at " << r.end << " but ring " << (i + 1) % s.rings.size()
                    << " starts at " << next.start;
                out.push_back({ViolationKind::chaining, r.end, msg.str()});
            }
            if (r.drone)
            {
                const auto d = *r.drone;
                bool clash = d == r.start || d == r.end;
                for (auto t : r.truck)
                {
                    clash = clash || t == d;
                }
                if (clash)
                {
                    out.push_back({ViolationKind::role, d,
                                   "ring " + std::to_string(i) + ": drone node " + std::to_string(d) +
                                       " is also visited by the truck"});
                }
            }
        }

        if (!indices_ok)
        {
            return out;
        }

        // Combined nodes are counted once, as the start of the ring they launch.
        std::vector<std::size_t> seen(n, 0);
        for (const auto &r : s.rings)
        {
            seen[r.start]++;
            for (auto t : r.truck)
            {
                seen[t]++;
            }
            if (r.drone)
            {
                seen[*r.drone]++;
            }
        }
        for (std::size_t v = 0; v < n; v++)
        {
            if (seen[v] == 0)
            {
                out.push_back({ViolationKind::coverage, v, "node " + std::to_string(v) + " is not served"});
            }
            else if (seen[v] > 1)
            {
                out.push_back({ViolationKind::duplicate, v,
                               "node " + std::to_string(v) + " is served " + std::to_string(seen[v]) + " times"});
            }
        }
        return out;
    }

    double makespan(const TspdSolution &s, const Instance &inst, const MetricPair &m)
    {
        auto violations = validate(s, inst);
        if (!violations.empty())
        {
            std::ostringstream msg;
            msg << "invalid TSPD solution:";
            for (const auto &v : violations)
            {
                msg << "\n  [" << to_string(v.kind) << "] " << v.message;
            }
            throw ValidationError(msg.str());
        }
        double total = 0.0;
        for (const auto &r : s.rings)
        {
            total += ring_cost(r, inst, m);
        }
        return total;
    }

    std::size_t count_straight(const TspdSolution &s)
    {
        std::size_t count = 0;
        for (const auto &r : s.rings)
        {
            count += r.is_straight() ? 1 : 0;
        }
        return count;
    }

    RoleCounts role_counts(const TspdSolution &s)
    {
        RoleCounts counts;
        for (const auto &r : s.rings)
        {
            counts.combined++;
            counts.truck += r.truck.size();
            counts.drone += r.drone ? 1 : 0;
        }
        return counts;
    }

    TspdSolution normalize_no_straight(const TspdSolution &s, const Instance &inst, const MetricPair &m)
    {
        (void)makespan(s, inst, m); // validates

        TspdSolution out = s;
        if (inst.size() <= 2)
        {
            return out;
        }

        auto &rings = out.rings;
        for (;;)
        {
            std::size_t i = 0;
            while (i < rings.size() && !rings[i].is_straight())
            {
                i++;
            }
            if (i == rings.size() || rings.size() < 2)
            {
                break;
            }

            const std::size_t succ = (i + 1) % rings.size();
            const std::size_t pred = (i + rings.size() - 1) % rings.size();
            const Ring straight = rings[i];

            // Prefer a neighbour that carries a drone: its sortie is relaunched
            // from the straight ring's far endpoint.  Successor first on ties.
            bool into_succ = true;
            if (!rings[succ].drone && rings[pred].drone)
            {
                into_succ = false;
            }

            if (into_succ)
            {
                Ring &target = rings[succ];
                target.truck.insert(target.truck.begin(), target.start);
                target.start = straight.start;
            }
            else
            {
                Ring &target = rings[pred];
                target.truck.push_back(target.end);
                target.end = straight.end;
            }
            rings.erase(rings.begin() + static_cast<std::ptrdiff_t>(i));
        }
        return out;
    }
}
