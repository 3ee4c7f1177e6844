#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "partition.hpp"
#include "tspd/errors.hpp"
#include "tspd/rng.hpp"
#include "tspd/solvers.hpp"

namespace tspd
{
    std::string_view to_string(SolveMethod method)
    {
        return method == SolveMethod::exact ? "exact" : "heuristic";
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point t0)
        {
            return std::chrono::duration<double>(Clock::now() - t0).count();
        }

        std::vector<std::size_t> closed(const std::vector<std::size_t> &order)
        {
            std::vector<std::size_t> seq(order);
            if (!seq.empty())
            {
                seq.push_back(seq.front());
            }
            return seq;
        }

        void check_order(const std::vector<std::size_t> &order, std::size_t n)
        {
            if (order.size() != n)
            {
                throw ParameterError("tour must visit all " + std::to_string(n) + " nodes once");
            }
            std::vector<char> seen(n, 0);
            for (auto v : order)
            {
                if (v >= n || seen[v])
                {
                    throw ParameterError("tour order is not a permutation of 0..n-1");
                }
                seen[v] = 1;
            }
        }

        void shuffle(std::vector<std::size_t> &v, Xoshiro256 &rng)
        {
            for (std::size_t i = v.size(); i > 1; i--)
            {
                std::swap(v[i - 1], v[static_cast<std::size_t>(rng.below(i))]);
            }
        }

        // small instances get as many kicks as one of this size
        constexpr std::size_t kMinKickBase = 64;
        // large instances re-anchor on one kick in this many
        constexpr std::uint64_t kReanchorPeriod = 8;

        bool improves(double candidate, double current)
        {
            if (current == detail::kInf)
            {
                return candidate < current;
            }
            return candidate < current - 1e-10 * std::max(1.0, std::abs(current));
        }
    }

    PartitionResult partition_order(const std::vector<std::size_t> &order, const Instance &inst, const MetricPair &m,
                                    std::size_t max_ring, bool allow_straight)
    {
        const std::size_t n = inst.size();
        check_order(order, n);
        if (max_ring < 2)
        {
            throw ParameterError("max_ring must be >= 2");
        }

        PartitionResult out;
        out.solution.instance_n = n;
        if (n <= 1)
        {
            return out;
        }

        detail::PointDistances dist(inst, m);
        detail::RingPartitioner part(dist, max_ring, allow_straight);
        const auto seq = closed(order);
        part.solve(seq);
        if (part.total() == detail::kInf)
        {
            throw ParameterError("no ring partition satisfies the constraints for this order");
        }
        out.solution.rings = part.rings();
        out.cost = part.total();
        return out;
    }

    TspdSolution partition_dp(const Tour &tour, const Instance &inst, const MetricPair &m, std::size_t max_ring)
    {
        return partition_order(tour.order, inst, m, max_ring).solution;
    }

    SolveReport tspd_exact(const Instance &inst, const MetricPair &m, ExactOptions options)
    {
        const auto t0 = Clock::now();
        const std::size_t n = inst.size();
        if (n < 2 || n > kMaxExactTspdSize)
        {
            throw SizeError("exact TSPD supports 2 <= n <= " + std::to_string(kMaxExactTspdSize) + ", got " +
                            std::to_string(n));
        }

        detail::MatrixDistances dist(inst, m);
        detail::RingPartitioner part(dist, kUnboundedRing, options.allow_straight);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::size_t> seq(n + 1);
        double best = detail::kInf;
        std::vector<Ring> best_rings;
        do
        {
            // a cyclic order and its mirror partition identically
            if (n >= 3 && perm[1] > perm[n - 1])
            {
                continue;
            }
            std::copy(perm.begin(), perm.end(), seq.begin());
            seq[n] = perm[0];
            part.solve(seq);
            if (improves(part.total(), best))
            {
                best = part.total();
                best_rings = part.rings();
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        if (best == detail::kInf)
        {
            throw ParameterError("no feasible TSPD solution under the given restrictions");
        }

        SolveReport report;
        report.solution.instance_n = n;
        report.solution.rings = std::move(best_rings);
        report.makespan = makespan(report.solution, inst, m);
        report.method = SolveMethod::exact;
        report.elapsed = seconds_since(t0);
        return report;
    }

    namespace
    {
        /*
         * Local search over the truck order.  The order is kept opened at a
         * combined node (position 0); a move rewrites a contiguous block of
         * positions 1..n-1 and is scored by re-partitioning only around it.
         */
        class OrderSearch
        {
        public:
            OrderSearch(const Instance &inst, const MetricPair &m, const HeuristicConfig &config, Xoshiro256 &rng)
                : inst_(inst), dist_(inst, m), part_(dist_, config.max_ring, true), scratch_(dist_, config.max_ring, true),
                  config_(config), rng_(rng), n_(inst.size())
            {
                neighbours_ = nearest_lists(config.neighbors);
                // small orders, or orders the closed ring can span, are re-solved in full
                full_eval_ = n_ <= 3 * config.max_ring;
            }

            double cost() const noexcept { return cost_; }

            void set_order(std::vector<std::size_t> order)
            {
                order_ = std::move(order);
                resolve();
            }

            std::vector<Ring> rings() const { return part_.rings(); }

            // Runs until `patience` consecutive rounds bring no improvement.
            void run(std::vector<double> &trace)
            {
                std::vector<char> active(n_, 1);
                std::size_t stall = 0;
                while (stall < config_.patience)
                {
                    bool improved = sweep(active, trace);
                    if (rotate_anchor(active))
                    {
                        trace.push_back(cost_);
                        improved = true;
                    }
                    stall = improved ? 0 : stall + 1;
                }
            }

            // Each kick re-opens the order at another node and applies a
            // double bridge inside a short window, then re-optimises locally.
            // A kick is kept only when the makespan drops.
            void perturb(std::size_t kicks, std::vector<double> &trace)
            {
                const std::size_t reach = config_.max_ring;
                const std::size_t widest = std::min({3 * reach, config_.move_window, n_ - 1});
                std::vector<char> active(n_, 0);
                std::vector<double> scratch_trace;
                for (std::size_t kick = 0; kick < kicks; kick++)
                {
                    const Snapshot saved = snapshot();
                    const double before = cost_;

                    // re-anchoring at a combined node keeps the current solution;
                    // a single ring has only one, so any node may become the anchor.
                    // Large instances re-anchor on a fraction of kicks only.
                    const auto rings = part_.rings();
                    const bool keeps_solution = rings.size() >= 2;
                    if (full_eval_ || !keeps_solution || rng_.below(kReanchorPeriod) == 0)
                    {
                        const std::size_t anchor =
                            keeps_solution ? rings[static_cast<std::size_t>(rng_.below(rings.size()))].start
                                           : order_[static_cast<std::size_t>(rng_.below(n_))];
                        std::rotate(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(pos_[anchor]),
                                    order_.end());
                        resolve();
                    }

                    std::size_t lo = 1, hi = 0;
                    if (widest >= 3)
                    {
                        const std::size_t len = 3 + static_cast<std::size_t>(rng_.below(widest - 2));
                        lo = 1 + static_cast<std::size_t>(rng_.below(n_ - len));
                        hi = lo + len - 1;
                        const std::size_t cut = lo + 1 + static_cast<std::size_t>(rng_.below(len - 1));
                        kick_block_.assign(order_.begin() + static_cast<std::ptrdiff_t>(cut),
                                           order_.begin() + static_cast<std::ptrdiff_t>(hi + 1));
                        kick_block_.insert(kick_block_.end(), order_.begin() + static_cast<std::ptrdiff_t>(lo),
                                           order_.begin() + static_cast<std::ptrdiff_t>(cut));
                        replace(lo, hi, kick_block_);
                    }

                    std::fill(active.begin(), active.end(), 0);
                    for (std::size_t t = 0; !keeps_solution && t <= reach && t < n_; t++)
                    {
                        active[order_[t]] = 1;
                        active[order_[n_ - 1 - t]] = 1;
                    }
                    if (hi >= lo)
                    {
                        const std::size_t from = lo > reach ? lo - reach : 0;
                        const std::size_t to = std::min(n_ - 1, hi + reach);
                        for (std::size_t p = from; p <= to; p++)
                        {
                            active[order_[p]] = 1;
                        }
                    }
                    while (sweep(active, scratch_trace))
                    {
                    }

                    if (improves(cost_, before))
                    {
                        trace.push_back(cost_);
                    }
                    else
                    {
                        restore(saved);
                    }
                }
            }

        private:
            std::vector<std::vector<std::size_t>> nearest_lists(std::size_t k) const
            {
                k = std::min(k, n_ - 1);
                std::vector<std::vector<std::size_t>> out(n_);
                std::vector<std::pair<double, std::size_t>> cand;
                for (std::size_t a = 0; a < n_; a++)
                {
                    cand.clear();
                    for (std::size_t b = 0; b < n_; b++)
                    {
                        if (b != a)
                        {
                            cand.emplace_back(dist_.truck(a, b), b);
                        }
                    }
                    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
                    for (std::size_t t = 0; t < k; t++)
                    {
                        out[a].push_back(cand[t].second);
                    }
                }
                return out;
            }

            void resolve()
            {
                tour_ = 0.0;
                for (std::size_t i = 0; i < n_; i++)
                {
                    tour_ += dist_.truck(order_[i], order_[(i + 1) % n_]);
                }
                pos_.assign(n_, 0);
                for (std::size_t i = 0; i < n_; i++)
                {
                    pos_[order_[i]] = i;
                }
                part_.solve(closed(order_));
                refresh();
            }

            // Positions lo..hi (1 <= lo <= hi < n) become `block`.
            void replace(std::size_t lo, std::size_t hi, const std::vector<std::size_t> &block)
            {
                tour_ += truck_delta(lo, hi, block);
                std::copy(block.begin(), block.end(), order_.begin() + static_cast<std::ptrdiff_t>(lo));
                for (std::size_t p = lo; p <= hi; p++)
                {
                    pos_[order_[p]] = p;
                }
                if (full_eval_)
                {
                    part_.solve(closed(order_));
                }
                else
                {
                    part_.update(lo, hi, block);
                }
                refresh();
            }

            void refresh()
            {
                cost_ = part_.total();
                // tiny instances are cheap enough to evaluate every move
                delta_cap_ = full_eval_ ? detail::kInf : config_.delta_filter * tour_ / static_cast<double>(n_);
            }

            struct Snapshot
            {
                std::vector<std::size_t> order, pos;
                detail::RingPartitioner<detail::PointDistances> part;
                double tour;
            };

            Snapshot snapshot() const { return {order_, pos_, part_, tour_}; }

            void restore(const Snapshot &s)
            {
                order_ = s.order;
                pos_ = s.pos;
                part_ = s.part;
                tour_ = s.tour;
                refresh();
            }

            // Change in closed truck tour length if positions lo..hi become block.
            double truck_delta(std::size_t lo, std::size_t hi, const std::vector<std::size_t> &block) const
            {
                double before = 0.0, after = 0.0;
                std::size_t prev_old = order_[lo - 1], prev_new = order_[lo - 1];
                for (std::size_t t = lo; t <= hi + 1; t++)
                {
                    const std::size_t cur_old = t < n_ ? order_[t] : order_[0];
                    const std::size_t cur_new = t <= hi ? block[t - lo] : cur_old;
                    before += dist_.truck(prev_old, cur_old);
                    after += dist_.truck(prev_new, cur_new);
                    prev_old = cur_old;
                    prev_new = cur_new;
                }
                return after - before;
            }

            double evaluate(std::size_t lo, std::size_t hi, const std::vector<std::size_t> &block)
            {
                if (!full_eval_)
                {
                    return part_.evaluate_window(lo, hi, block);
                }
                candidate_ = order_;
                std::copy(block.begin(), block.end(), candidate_.begin() + static_cast<std::ptrdiff_t>(lo));
                scratch_.solve(closed(candidate_));
                return scratch_.total();
            }

            void apply(std::size_t lo, std::size_t hi, const std::vector<std::size_t> &block, double new_cost,
                       std::vector<char> &active)
            {
                replace(lo, hi, block);
                (void)new_cost;
                const std::size_t reach = config_.max_ring;
                const std::size_t from = lo > reach ? lo - reach : 0;
                const std::size_t to = std::min(n_ - 1, hi + reach);
                for (std::size_t p = from; p <= to; p++)
                {
                    active[order_[p]] = 1;
                }
            }

            // Tries the candidate moves anchored at node a; applies the first improving one.
            bool improve_node(std::size_t a, std::vector<char> &active)
            {
                const std::size_t p = pos_[a];
                const std::size_t last = n_ - 1;
                auto attempt = [&](std::size_t lo, std::size_t hi) -> bool {
                    if (lo < 1 || hi > last || lo >= hi || hi - lo + 1 > config_.move_window)
                    {
                        return false;
                    }
                    if (std::equal(block_.begin(), block_.end(), order_.begin() + static_cast<std::ptrdiff_t>(lo)) ||
                        truck_delta(lo, hi, block_) > delta_cap_)
                    {
                        return false;
                    }
                    const double c = evaluate(lo, hi, block_);
                    if (improves(c, cost_))
                    {
                        apply(lo, hi, block_, c, active);
                        return true;
                    }
                    return false;
                };
                auto reversal = [&](std::size_t lo, std::size_t hi) -> bool {
                    if (lo < 1 || hi > last || lo >= hi || hi - lo + 1 > config_.move_window)
                    {
                        return false;
                    }
                    block_.assign(order_.rbegin() + static_cast<std::ptrdiff_t>(n_ - 1 - hi),
                                  order_.rbegin() + static_cast<std::ptrdiff_t>(n_ - lo));
                    return attempt(lo, hi);
                };

                for (auto b : neighbours_[a])
                {
                    const std::size_t q = pos_[b];
                    // segment reversals that make a and b adjacent
                    if (p < q)
                    {
                        if (reversal(p + 1, q) || reversal(p, q - 1))
                        {
                            return true;
                        }
                    }
                    else
                    {
                        if (reversal(q + 1, p) || (q >= 1 && reversal(q, p - 1)))
                        {
                            return true;
                        }
                    }

                    // or-opt: move a short segment starting or ending at a next to b
                    for (std::size_t len = 1; len <= config_.or_opt_max; len++)
                    {
                        for (int side = 0; side < (len == 1 ? 1 : 2); side++)
                        {
                            const std::size_t s0 = side == 0 ? p : (p + 1 >= len ? p + 1 - len : n_);
                            if (s0 < 1 || s0 == n_ || s0 + len - 1 > last)
                            {
                                continue;
                            }
                            const std::size_t s1 = s0 + len - 1;
                            if (q >= s0 && q <= s1)
                            {
                                continue;
                            }
                            if (or_move(s0, s1, q, active, attempt))
                            {
                                return true;
                            }
                        }
                    }
                }
                return false;
            }

            // Segment s0..s1 re-inserted before or after position q, both orientations.
            template <typename Attempt>
            bool or_move(std::size_t s0, std::size_t s1, std::size_t q, std::vector<char> &active, Attempt &attempt)
            {
                (void)active;
                const std::size_t len = s1 - s0 + 1;
                for (int after = 0; after < 2; after++)
                {
                    for (int flip = 0; flip < 2; flip++)
                    {
                        std::size_t lo, hi;
                        if (q > s1)
                        {
                            lo = s0;
                            hi = after ? q : q - 1;
                        }
                        else
                        {
                            lo = after ? q + 1 : q;
                            hi = s1;
                        }
                        if (lo < 1 || hi >= n_ || lo >= hi || hi - lo + 1 > config_.move_window)
                        {
                            continue;
                        }
                        segment_.assign(order_.begin() + static_cast<std::ptrdiff_t>(s0),
                                        order_.begin() + static_cast<std::ptrdiff_t>(s1 + 1));
                        if (flip)
                        {
                            std::reverse(segment_.begin(), segment_.end());
                        }
                        block_.clear();
                        if (q > s1)
                        {
                            block_.insert(block_.end(), order_.begin() + static_cast<std::ptrdiff_t>(s1 + 1),
                                          order_.begin() + static_cast<std::ptrdiff_t>(hi + 1));
                            block_.insert(block_.end(), segment_.begin(), segment_.end());
                        }
                        else
                        {
                            block_.insert(block_.end(), segment_.begin(), segment_.end());
                            block_.insert(block_.end(), order_.begin() + static_cast<std::ptrdiff_t>(lo),
                                          order_.begin() + static_cast<std::ptrdiff_t>(s0));
                        }
                        if (block_.size() != hi - lo + 1 || (len == 1 && flip))
                        {
                            continue;
                        }
                        if (attempt(lo, hi))
                        {
                            return true;
                        }
                    }
                }
                return false;
            }

            bool sweep(std::vector<char> &active, std::vector<double> &trace)
            {
                std::vector<std::size_t> todo;
                for (std::size_t v = 0; v < n_; v++)
                {
                    if (active[v])
                    {
                        todo.push_back(v);
                    }
                }
                shuffle(todo, rng_);
                bool improved = false;
                for (auto a : todo)
                {
                    if (!active[a])
                    {
                        continue;
                    }
                    if (improve_node(a, active))
                    {
                        trace.push_back(cost_);
                        improved = true;
                    }
                    else
                    {
                        active[a] = 0;
                    }
                }
                return improved;
            }

            // Re-opens the order at another combined node.  The current
            // solution stays feasible, so the cost cannot increase.
            bool rotate_anchor(std::vector<char> &active)
            {
                const auto rings = part_.rings();
                if (rings.size() < 2)
                {
                    return false;
                }
                const std::size_t pick = 1 + static_cast<std::size_t>(rng_.below(rings.size() - 1));
                const std::size_t anchor = rings[pick].start;
                const std::size_t shift = pos_[anchor];
                const double before = cost_;
                const std::size_t old_anchor = order_[0];
                std::rotate(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(shift), order_.end());
                resolve();

                const std::size_t reach = config_.max_ring;
                for (std::size_t t = 0; t <= reach && t < n_; t++)
                {
                    active[order_[t]] = 1;
                    active[order_[n_ - 1 - t]] = 1;
                    active[order_[(pos_[old_anchor] + t) % n_]] = 1;
                    active[order_[(pos_[old_anchor] + n_ - t) % n_]] = 1;
                }
                return improves(cost_, before);
            }

            const Instance &inst_;
            detail::PointDistances dist_;
            detail::RingPartitioner<detail::PointDistances> part_;
            detail::RingPartitioner<detail::PointDistances> scratch_;
            const HeuristicConfig &config_;
            Xoshiro256 &rng_;
            std::size_t n_;
            bool full_eval_ = false;

            std::vector<std::vector<std::size_t>> neighbours_;
            std::vector<std::size_t> order_;
            std::vector<std::size_t> pos_;
            std::vector<std::size_t> candidate_;
            std::vector<std::size_t> block_;
            std::vector<std::size_t> segment_;
            double cost_ = detail::kInf;
            double delta_cap_ = detail::kInf;
            double tour_ = 0.0;
            std::vector<std::size_t> kick_block_;
        };
    }

    SolveReport tspd_heuristic(const Instance &inst, const MetricPair &m, std::uint64_t seed,
                               const HeuristicConfig &config)
    {
        const auto t0 = Clock::now();
        const std::size_t n = inst.size();
        if (n < 2)
        {
            throw SizeError("heuristic TSPD needs at least 2 points");
        }
        if (config.restarts < 1 || config.max_ring < 2)
        {
            throw ParameterError("heuristic config needs restarts >= 1 and max_ring >= 2");
        }
        if (!(config.kick_rate >= 0.0) || !std::isfinite(config.kick_rate))
        {
            throw ParameterError("kick_rate must be a non-negative number");
        }
        if (!(config.delta_filter > 0.0))
        {
            throw ParameterError("delta_filter must be positive");
        }

        SolveReport report;
        report.method = SolveMethod::heuristic;
        report.seed = seed;
        report.solution.instance_n = n;

        double best = detail::kInf;
        std::vector<double> best_trace;
        for (std::size_t r = 0; r < config.restarts; r++)
        {
            auto rng = make_stream(seed, {0x74737064ULL, r});
            const Tour tour = tsp_heuristic(inst, m.truck_norm(), derive_seed(seed, {0x746f7572ULL, r}), 1);

            std::vector<double> trace;
            OrderSearch search(inst, m, config, rng);
            search.set_order(tour.order);
            trace.push_back(search.cost());
            search.run(trace);
            const double kicks = config.kick_rate * static_cast<double>(std::max(n, kMinKickBase));
            search.perturb(static_cast<std::size_t>(std::ceil(kicks)), trace);

            if (improves(search.cost(), best))
            {
                best = search.cost();
                report.solution.rings = search.rings();
                best_trace = std::move(trace);
            }
        }

        report.solution = normalize_no_straight(report.solution, inst, m);
        report.makespan = makespan(report.solution, inst, m);
        // normalisation can only lower the cost; re-summation may differ in the last bits
        if (report.makespan < best_trace.back())
        {
            best_trace.push_back(report.makespan);
        }
        report.trace = std::move(best_trace);
        report.elapsed = seconds_since(t0);
        return report;
    }

    double scaled_makespan(const SolveReport &report, std::size_t n)
    {
        if (n < 1)
        {
            throw ParameterError("scaled makespan needs n >= 1");
        }
        return report.makespan / std::sqrt(static_cast<double>(n));
    }
}
