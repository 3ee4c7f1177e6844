#pragma once

// Test-only reference implementations.  None of these share code with the
// routines they check beyond the ring cost definition in ring_model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "tspd/geometry.hpp"
#include "tspd/ring_model.hpp"
#include "tspd/rng.hpp"

namespace oracle
{
    inline constexpr double kInf = std::numeric_limits<double>::infinity();

    // Composite Simpson rule with an even number of panels.
    template <typename F>
    double simpson(F &&f, double a, double b, std::size_t panels)
    {
        panels += panels % 2;
        const double step = (b - a) / static_cast<double>(panels);
        double sum = f(a) + f(b);
        for (std::size_t i = 1; i < panels; i++)
        {
            sum += (i % 2 ? 4.0 : 2.0) * f(a + step * static_cast<double>(i));
        }
        return sum * step / 3.0;
    }

    /*
     * E[sqrt(Z^2 + h^4 (U0 - U1)^2)] / h with Z ~ Exp(1) and U0, U1 ~ U[0,1].
     * |U0 - U1| has density 2(1 - d) on [0, 1], which leaves a 2-D integral.
     */
    inline double straight_bound(double h)
    {
        const double c = h * h;
        auto inner = [c](double z) {
            return simpson([&](double d) { return 2.0 * (1.0 - d) * std::sqrt(z * z + c * c * d * d); }, 0.0, 1.0,
                           400);
        };
        const double mean = simpson([&](double z) { return std::exp(-z) * inner(z); }, 0.0, 60.0, 6000);
        return mean / h;
    }

    // Ring over positions i..j of seq, drone at position k (or none when k is out of (i, j)).
    inline tspd::Ring make_ring(const std::vector<std::size_t> &seq, std::size_t i, std::size_t j, std::size_t k)
    {
        tspd::Ring r;
        r.start = seq[i];
        r.end = seq[j];
        for (std::size_t t = i + 1; t < j; t++)
        {
            if (t == k)
            {
                r.drone = seq[t];
            }
            else
            {
                r.truck.push_back(seq[t]);
            }
        }
        return r;
    }

    /*
     * Minimum makespan over every split of the cyclic order (opened at
     * position 0) into rings and every drone choice per ring, by plain
     * enumeration of the combined-node subsets.
     */
    inline double brute_partition(const std::vector<std::size_t> &order, const tspd::Instance &inst,
                                  const tspd::MetricPair &m, std::size_t max_ring, bool allow_straight = true)
    {
        const std::size_t len = order.size();
        std::vector<std::size_t> seq(order);
        seq.push_back(order.front());

        auto best_ring = [&](std::size_t i, std::size_t j) {
            if (j == i + 1 && !allow_straight)
            {
                return kInf;
            }
            double best = tspd::ring_cost(make_ring(seq, i, j, j), inst, m);
            if (j == i + 1)
            {
                return best;
            }
            for (std::size_t k = i + 1; k < j; k++)
            {
                best = std::min(best, tspd::ring_cost(make_ring(seq, i, j, k), inst, m));
            }
            return best;
        };

        double best = kInf;
        const std::size_t inner = len - 1;
        for (std::size_t mask = 0; mask < (std::size_t{1} << inner); mask++)
        {
            std::vector<std::size_t> cuts{0};
            for (std::size_t b = 0; b < inner; b++)
            {
                if (mask >> b & 1)
                {
                    cuts.push_back(b + 1);
                }
            }
            cuts.push_back(len);
            double total = 0.0;
            if (cuts.size() == 2)
            {
                // a single ring that closes on itself
                if (len < 3 || len > max_ring)
                {
                    continue;
                }
                total = best_ring(0, len);
            }
            else
            {
                for (std::size_t c = 0; c + 1 < cuts.size() && total < kInf; c++)
                {
                    const std::size_t i = cuts[c], j = cuts[c + 1];
                    total += (j - i + 1 <= max_ring) ? best_ring(i, j) : kInf;
                }
            }
            best = std::min(best, total);
        }
        return best;
    }

    // Global optimum by trying every order, every rotation included, so any
    // node may be the first combined node.  Only for n <= 7.
    inline double brute_tspd(const tspd::Instance &inst, const tspd::MetricPair &m, bool allow_straight = true)
    {
        std::vector<std::size_t> perm(inst.size());
        std::iota(perm.begin(), perm.end(), 0);
        double best = kInf;
        do
        {
            best = std::min(best, brute_partition(perm, inst, m, perm.size() + 1, allow_straight));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    // Held-Karp-free TSP: every order with node 0 first.
    inline double brute_tsp(const tspd::Instance &inst, tspd::TruckNorm norm)
    {
        const std::size_t n = inst.size();
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = kInf;
        const tspd::MetricPair m(norm, 1.0);
        do
        {
            double len = 0.0;
            for (std::size_t i = 0; i < n; i++)
            {
                len += tspd::truck_dist(m, inst.points[perm[i]], inst.points[perm[(i + 1) % n]]);
            }
            best = std::min(best, len);
        } while (std::next_permutation(perm.begin() + 1, perm.end()));
        return best;
    }

    // A random feasible solution: random order, random combined nodes, random drone per ring.
    inline tspd::TspdSolution random_solution(std::size_t n, tspd::Xoshiro256 &rng)
    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; i--)
        {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        }
        std::vector<std::size_t> seq(order);
        seq.push_back(order.front());

        std::vector<std::size_t> cuts{0};
        for (std::size_t p = 1; p < n; p++)
        {
            if (rng.below(2) == 0)
            {
                cuts.push_back(p);
            }
        }
        if (cuts.size() == 1 && n < 3)
        {
            cuts.push_back(1);
        }
        cuts.push_back(n);

        tspd::TspdSolution s;
        s.instance_n = n;
        for (std::size_t c = 0; c + 1 < cuts.size(); c++)
        {
            const std::size_t i = cuts[c], j = cuts[c + 1];
            std::size_t k = j; // no drone
            if (j > i + 1 && rng.below(3) != 0)
            {
                k = i + 1 + static_cast<std::size_t>(rng.below(j - i - 1));
            }
            s.rings.push_back(make_ring(seq, i, j, k));
        }
        return s;
    }

    inline tspd::Instance random_instance(std::size_t n, tspd::Xoshiro256 &rng)
    {
        tspd::Instance inst;
        for (std::size_t i = 0; i < n; i++)
        {
            const double x = rng.uniform();
            inst.points.push_back({x, rng.uniform()});
        }
        return inst;
    }
}
