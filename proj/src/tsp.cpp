#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "tspd/errors.hpp"
#include "tspd/rng.hpp"
#include "tspd/solvers.hpp"

namespace tspd
{
    namespace
    {
        double norm_dist(TruckNorm norm, const Point &p, const Point &q)
        {
            return norm == TruckNorm::euclidean ? euclidean_dist(p, q) : rectilinear_dist(p, q);
        }

        std::vector<std::vector<std::size_t>> nearest_lists(const Instance &inst, TruckNorm norm, std::size_t k)
        {
            const std::size_t n = inst.size();
            k = std::min(k, n - 1);
            std::vector<std::vector<std::size_t>> out(n);
            std::vector<std::pair<double, std::size_t>> cand;
            for (std::size_t a = 0; a < n; a++)
            {
                cand.clear();
                for (std::size_t b = 0; b < n; b++)
                {
                    if (b != a)
                    {
                        cand.emplace_back(norm_dist(norm, inst.points[a], inst.points[b]), b);
                    }
                }
                std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
                out[a].reserve(k);
                for (std::size_t t = 0; t < k; t++)
                {
                    out[a].push_back(cand[t].second);
                }
            }
            return out;
        }

        std::vector<std::size_t> nearest_neighbour_tour(const Instance &inst, TruckNorm norm, std::size_t start)
        {
            const std::size_t n = inst.size();
            std::vector<std::size_t> order;
            order.reserve(n);
            std::vector<char> used(n, 0);
            std::size_t cur = start;
            used[cur] = 1;
            order.push_back(cur);
            for (std::size_t step = 1; step < n; step++)
            {
                double best = std::numeric_limits<double>::infinity();
                std::size_t next = n;
                for (std::size_t b = 0; b < n; b++)
                {
                    if (!used[b])
                    {
                        const double d = norm_dist(norm, inst.points[cur], inst.points[b]);
                        if (d < best)
                        {
                            best = d;
                            next = b;
                        }
                    }
                }
                used[next] = 1;
                order.push_back(next);
                cur = next;
            }
            return order;
        }

        // 2-opt over neighbour lists with a queue of "dirty" nodes.
        class TwoOpt
        {
        public:
            TwoOpt(const Instance &inst, TruckNorm norm, const std::vector<std::vector<std::size_t>> &neighbours)
                : inst_(inst), norm_(norm), neighbours_(neighbours) {}

            void run(std::vector<std::size_t> &tour)
            {
                const std::size_t n = tour.size();
                pos_.assign(n, 0);
                for (std::size_t i = 0; i < n; i++)
                {
                    pos_[tour[i]] = i;
                }
                std::deque<std::size_t> queue(tour.begin(), tour.end());
                std::vector<char> queued(n, 1);
                while (!queue.empty())
                {
                    const std::size_t a = queue.front();
                    queue.pop_front();
                    queued[a] = 0;
                    if (improve(tour, a, queue, queued))
                    {
                        if (!queued[a])
                        {
                            queue.push_back(a);
                            queued[a] = 1;
                        }
                    }
                }
            }

        private:
            double d(std::size_t a, std::size_t b) const
            {
                return norm_dist(norm_, inst_.points[a], inst_.points[b]);
            }

            bool improve(std::vector<std::size_t> &tour, std::size_t a, std::deque<std::size_t> &queue,
                         std::vector<char> &queued)
            {
                const std::size_t n = tour.size();
                for (int dir = 0; dir < 2; dir++)
                {
                    const std::size_t pa = pos_[a];
                    const std::size_t na = dir == 0 ? tour[(pa + 1) % n] : tour[(pa + n - 1) % n];
                    const double d_a = d(a, na);
                    for (auto c : neighbours_[a])
                    {
                        const double d_ac = d(a, c);
                        if (d_ac >= d_a)
                        {
                            break;
                        }
                        const std::size_t pc = pos_[c];
                        const std::size_t nc = dir == 0 ? tour[(pc + 1) % n] : tour[(pc + n - 1) % n];
                        if (c == na || nc == a)
                        {
                            continue;
                        }
                        const double gain = d_a + d(c, nc) - d_ac - d(na, nc);
                        if (gain > 1e-12)
                        {
                            // removes (t[i], t[i+1]) and (t[j], t[j+1])
                            if (dir == 0)
                            {
                                reverse(tour, pa, pc);
                            }
                            else
                            {
                                reverse(tour, (pc + n - 1) % n, (pa + n - 1) % n);
                            }
                            for (auto v : {a, na, c, nc})
                            {
                                if (!queued[v])
                                {
                                    queue.push_back(v);
                                    queued[v] = 1;
                                }
                            }
                            return true;
                        }
                    }
                }
                return false;
            }

            // Reverses positions i+1..j (cyclic), choosing the shorter side.
            void reverse(std::vector<std::size_t> &tour, std::size_t i, std::size_t j)
            {
                const std::size_t n = tour.size();
                std::size_t from = (i + 1) % n;
                std::size_t to = j;
                std::size_t len = (to + n - from) % n + 1;
                if (2 * len > n)
                {
                    from = (j + 1) % n;
                    to = i;
                    len = n - len;
                }
                for (std::size_t s = 0; s < len / 2; s++)
                {
                    const std::size_t x = (from + s) % n;
                    const std::size_t y = (to + n - s) % n;
                    std::swap(tour[x], tour[y]);
                    pos_[tour[x]] = x;
                    pos_[tour[y]] = y;
                }
            }

            const Instance &inst_;
            TruckNorm norm_;
            const std::vector<std::vector<std::size_t>> &neighbours_;
            std::vector<std::size_t> pos_;
        };
    }

    double tour_length(const std::vector<std::size_t> &order, const Instance &inst, TruckNorm norm)
    {
        if (order.size() < 2)
        {
            return 0.0;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < order.size(); i++)
        {
            total += norm_dist(norm, inst.points[order[i]], inst.points[order[(i + 1) % order.size()]]);
        }
        return total;
    }

    Tour tsp_exact(const Instance &inst, TruckNorm norm)
    {
        const std::size_t n = inst.size();
        if (n < 2 || n > kMaxExactTspSize)
        {
            throw SizeError("exact TSP supports 2 <= n <= " + std::to_string(kMaxExactTspSize) + ", got " +
                            std::to_string(n));
        }

        // dp[mask][j]: shortest path from node 0 through the nodes of mask
        // (subsets of 1..n-1, bit j-1 for node j) ending at j.
        const std::size_t m = n - 1;
        const std::size_t full = std::size_t{1} << m;
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dp(full * m, inf);
        std::vector<std::uint8_t> parent(full * m, 0);
        auto dist = [&](std::size_t a, std::size_t b) { return norm_dist(norm, inst.points[a], inst.points[b]); };

        for (std::size_t j = 0; j < m; j++)
        {
            dp[(std::size_t{1} << j) * m + j] = dist(0, j + 1);
        }
        for (std::size_t mask = 1; mask < full; mask++)
        {
            for (std::size_t j = 0; j < m; j++)
            {
                const double here = dp[mask * m + j];
                if (!(mask >> j & 1) || here == inf)
                {
                    continue;
                }
                for (std::size_t k = 0; k < m; k++)
                {
                    if (mask >> k & 1)
                    {
                        continue;
                    }
                    const std::size_t next = mask | (std::size_t{1} << k);
                    const double c = here + dist(j + 1, k + 1);
                    if (c < dp[next * m + k])
                    {
                        dp[next * m + k] = c;
                        parent[next * m + k] = static_cast<std::uint8_t>(j);
                    }
                }
            }
        }

        double best = inf;
        std::size_t last = 0;
        for (std::size_t j = 0; j < m; j++)
        {
            const double c = dp[(full - 1) * m + j] + dist(j + 1, 0);
            if (c < best)
            {
                best = c;
                last = j;
            }
        }

        Tour tour;
        std::vector<std::size_t> rev;
        std::size_t mask = full - 1;
        std::size_t j = last;
        while (mask)
        {
            rev.push_back(j + 1);
            const std::size_t prev = parent[mask * m + j];
            mask &= ~(std::size_t{1} << j);
            j = prev;
        }
        tour.order.push_back(0);
        tour.order.insert(tour.order.end(), rev.rbegin(), rev.rend());
        tour.length = tour_length(tour.order, inst, norm);
        return tour;
    }

    Tour tsp_heuristic(const Instance &inst, TruckNorm norm, std::uint64_t seed, std::size_t restarts)
    {
        const std::size_t n = inst.size();
        if (n < 2)
        {
            throw SizeError("heuristic TSP needs at least 2 points");
        }
        if (restarts < 1)
        {
            throw ParameterError("restarts must be >= 1");
        }

        const auto neighbours = nearest_lists(inst, norm, 16);
        TwoOpt improver(inst, norm, neighbours);
        Tour best;
        best.length = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < restarts; r++)
        {
            auto rng = make_stream(seed, {0x747370ULL, r});
            auto order = nearest_neighbour_tour(inst, norm, static_cast<std::size_t>(rng.below(n)));
            improver.run(order);
            const double len = tour_length(order, inst, norm);
            if (len < best.length)
            {
                best.order = std::move(order);
                best.length = len;
            }
        }
        return best;
    }
}
