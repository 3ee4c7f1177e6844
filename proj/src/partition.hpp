#pragma once

// Internal: ring-partition dynamic programme over a fixed node sequence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tspd/geometry.hpp"
#include "tspd/ring_model.hpp"

namespace tspd::detail
{
    inline constexpr double kInf = std::numeric_limits<double>::infinity();
    inline constexpr std::size_t kNoDrone = std::numeric_limits<std::size_t>::max();

    // Distances computed from coordinates on demand.
    class PointDistances
    {
    public:
        PointDistances(const Instance &inst, const MetricPair &m)
            : pts_(inst.points), norm_(m.truck_norm()), inv_alpha_(1.0 / m.alpha()) {}

        double truck(std::size_t a, std::size_t b) const noexcept
        {
            const auto &p = pts_[a];
            const auto &q = pts_[b];
            if (norm_ == TruckNorm::euclidean)
            {
                const double dx = p.x - q.x, dy = p.y - q.y;
                return std::sqrt(dx * dx + dy * dy);
            }
            return std::abs(p.x - q.x) + std::abs(p.y - q.y);
        }

        double drone(std::size_t a, std::size_t b) const noexcept
        {
            const auto &p = pts_[a];
            const auto &q = pts_[b];
            const double dx = p.x - q.x, dy = p.y - q.y;
            return std::sqrt(dx * dx + dy * dy) * inv_alpha_;
        }

    private:
        const std::vector<Point> &pts_;
        TruckNorm norm_;
        double inv_alpha_;
    };

    // Dense tables for tiny instances.
    class MatrixDistances
    {
    public:
        MatrixDistances(const Instance &inst, const MetricPair &m) : n_(inst.size()), truck_(n_ * n_), drone_(n_ * n_)
        {
            PointDistances on_the_fly(inst, m);
            for (std::size_t a = 0; a < n_; a++)
            {
                for (std::size_t b = 0; b < n_; b++)
                {
                    truck_[a * n_ + b] = on_the_fly.truck(a, b);
                    drone_[a * n_ + b] = on_the_fly.drone(a, b);
                }
            }
        }

        double truck(std::size_t a, std::size_t b) const noexcept { return truck_[a * n_ + b]; }
        double drone(std::size_t a, std::size_t b) const noexcept { return drone_[a * n_ + b]; }

    private:
        std::size_t n_;
        std::vector<double> truck_;
        std::vector<double> drone_;
    };

    struct RingChoice
    {
        double cost = kInf;
        std::size_t drone = kNoDrone; // position offset within the sequence
    };

    /*
     * seq has m + 1 entries with seq[m] == seq[0].  Position 0 (and m) is a
     * combined node.  A ring (i, j), i < j, uses positions i..j; node count is
     * j - i + 1, except the closed ring (0, m) which has m distinct nodes.
     */
    template <typename Dist>
    class RingPartitioner
    {
    public:
        RingPartitioner(const Dist &dist, std::size_t max_ring, bool allow_straight)
            : dist_(&dist), max_ring_(max_ring), allow_straight_(allow_straight) {}

        // Best ring over positions i..j of `seq`, given prefix truck lengths.
        RingChoice best_ring(std::span<const std::size_t> seq, std::span<const double> prefix, std::size_t i,
                             std::size_t j) const
        {
            RingChoice best;
            const double along = prefix[j] - prefix[i];
            if (j == i + 1)
            {
                if (allow_straight_)
                {
                    best.cost = along;
                }
                return best;
            }
            best.cost = along;
            if (j == i + 2)
            {
                const std::size_t k = i + 1;
                const double truck = dist_->truck(seq[i], seq[j]);
                const double drone = dist_->drone(seq[i], seq[k]) + dist_->drone(seq[k], seq[j]);
                const double c = std::max(truck, drone);
                if (c < best.cost)
                {
                    best = {c, k};
                }
                return best;
            }
            for (std::size_t k = i + 1; k < j; k++)
            {
                const double truck = along - (prefix[k + 1] - prefix[k - 1]) + dist_->truck(seq[k - 1], seq[k + 1]);
                const double drone = dist_->drone(seq[i], seq[k]) + dist_->drone(seq[k], seq[j]);
                const double c = std::max(truck, drone);
                if (c < best.cost)
                {
                    best = {c, k};
                }
            }
            return best;
        }

        std::size_t span_limit() const noexcept
        {
            return max_ring_ == std::numeric_limits<std::size_t>::max() ? max_ring_ : max_ring_ - 1;
        }

        bool closed_ring_allowed(std::size_t m) const noexcept { return m >= 3 && m <= max_ring_; }

        // Ring costs, forward pass (with predecessor tracking) and backward pass.
        void solve(std::span<const std::size_t> seq)
        {
            seq_.assign(seq.begin(), seq.end());
            const std::size_t m = seq_.size() - 1;
            pos_.assign(m + 1, 0);
            for (std::size_t t = 0; t < m; t++)
            {
                pos_[seq_[t]] = t;
            }
            prefix_.assign(m + 1, 0.0);
            update_prefix(0);

            width_ = std::min(span_limit(), m) + 1;
            ring_cost_.assign((m + 1) * width_, kInf);
            ring_drone_.assign((m + 1) * width_, kNoDrone);
            update_rings(0, m);

            forward_.assign(m + 1, kInf);
            rings_.assign(m + 1, 0);
            pred_.assign(m + 1, 0);
            drone_.assign(m + 1, kNoDrone);
            forward_[0] = 0.0;
            backward_.assign(m + 1, kInf);
            backward_[m] = 0.0;
            forward_pass(1);
            backward_pass(m);
        }

        /*
         * Same result as solve() on the sequence with positions lo..hi replaced
         * by `block`, recomputing only what the change can reach.  Requires
         * 1 <= lo <= hi < m and that the closed ring is not allowed.
         */
        void update(std::size_t lo, std::size_t hi, std::span<const std::size_t> block)
        {
            for (std::size_t t = lo; t <= hi; t++)
            {
                seq_[t] = block[t - lo];
                pos_[seq_[t]] = t;
            }
            update_prefix(lo - 1);
            update_rings(lo, hi);
            forward_pass(lo);
            backward_pass(hi);
        }

        double total() const noexcept { return total_; }

        std::vector<Ring> rings() const
        {
            std::vector<Ring> out;
            const std::size_t m = seq_.size() - 1;
            if (m == 0 || total_ == kInf)
            {
                return out;
            }
            if (closed_)
            {
                out.push_back(make_ring(0, m, closed_drone_));
                return out;
            }
            for (std::size_t j = m; j > 0; j = pred_[j])
            {
                out.push_back(make_ring(pred_[j], j, drone_[j]));
            }
            std::reverse(out.begin(), out.end());
            return out;
        }

        /*
         * Cost of the current sequence with positions lo..hi replaced by
         * `block` (same length), using the stored forward values left of lo
         * and backward values right of hi.  Every solution has a combined node
         * within span_limit() positions after hi, so the split is exact.
         * Requires 1 <= lo <= hi < m and that the closed ring is not allowed.
         */
        double evaluate_window(std::size_t lo, std::size_t hi, std::span<const std::size_t> block) const
        {
            const std::size_t m = seq_.size() - 1;
            const std::size_t reach = span_limit();
            const std::size_t end = reach >= m - hi ? m : hi + reach;
            const std::size_t base = lo > reach ? lo - reach : 0;

            // local copy of positions base..end with the block substituted; orig_
            // maps each local slot to its position in the current sequence
            const std::size_t len = end - base + 1;
            local_seq_.resize(len);
            orig_.resize(len);
            up_.assign(len, 0);
            down_.assign(len, 0);
            for (std::size_t t = 0; t < len; t++)
            {
                const std::size_t pos = base + t;
                const bool inside = pos >= lo && pos <= hi;
                local_seq_[t] = inside ? block[pos - lo] : seq_[pos];
                orig_[t] = inside ? pos_[local_seq_[t]] : pos;
                if (t > 0)
                {
                    // lengths of the runs of consecutive original positions ending at t
                    up_[t] = orig_[t] == orig_[t - 1] + 1 ? up_[t - 1] + 1 : 0;
                    down_[t] = orig_[t] + 1 == orig_[t - 1] ? down_[t - 1] + 1 : 0;
                }
            }
            local_prefix_.assign(len, 0.0);
            for (std::size_t t = 0; t + 1 < len; t++)
            {
                local_prefix_[t + 1] = local_prefix_[t] + dist_->truck(local_seq_[t], local_seq_[t + 1]);
            }
            local_forward_.assign(len, kInf);
            for (std::size_t t = 0; base + t < lo; t++)
            {
                local_forward_[t] = forward_[base + t];
            }

            double best = kInf;
            for (std::size_t j = lo; j <= end; j++)
            {
                const std::size_t tj = j - base;
                const std::size_t first = j > reach ? j - reach : 0;
                double fj = kInf;
                for (std::size_t i = std::max(first, base); i < j; i++)
                {
                    const std::size_t ti = i - base;
                    if (local_forward_[ti] == kInf || (i == 0 && j == m))
                    {
                        continue;
                    }
                    // a ring over an unbroken (possibly reversed) stretch of the
                    // current sequence costs the same as before
                    const std::size_t d = tj - ti;
                    double cost;
                    if (up_[tj] >= d)
                    {
                        cost = ring_cost_[orig_[ti] * width_ + d];
                    }
                    else if (down_[tj] >= d)
                    {
                        cost = ring_cost_[orig_[tj] * width_ + d];
                    }
                    else
                    {
                        cost = best_ring(local_seq_, local_prefix_, ti, tj).cost;
                    }
                    fj = std::min(fj, local_forward_[ti] + cost);
                }
                local_forward_[tj] = fj;
                if (j > hi)
                {
                    best = std::min(best, fj + backward_[j]);
                }
            }
            return best;
        }

        std::span<const std::size_t> sequence() const noexcept { return seq_; }

    private:
        void update_prefix(std::size_t from)
        {
            const std::size_t m = seq_.size() - 1;
            for (std::size_t t = from; t < m; t++)
            {
                prefix_[t + 1] = prefix_[t] + dist_->truck(seq_[t], seq_[t + 1]);
            }
        }

        // Recomputes every cached ring that overlaps positions lo..hi.
        void update_rings(std::size_t lo, std::size_t hi)
        {
            const std::size_t m = seq_.size() - 1;
            const std::size_t reach = width_ - 1;
            const std::size_t first = lo > reach ? lo - reach : 0;
            for (std::size_t i = first; i <= hi && i < m; i++)
            {
                const std::size_t last = reach >= m - i ? m : i + reach;
                for (std::size_t j = std::max(i + 1, lo); j <= last; j++)
                {
                    if (i == 0 && j == m)
                    {
                        continue; // the closed ring is handled in forward_pass
                    }
                    const auto ring = best_ring(seq_, prefix_, i, j);
                    ring_cost_[i * width_ + (j - i)] = ring.cost;
                    ring_drone_[i * width_ + (j - i)] = ring.drone;
                }
            }
        }

        // forward_[j] for j >= from, then the total.
        void forward_pass(std::size_t from)
        {
            const std::size_t m = seq_.size() - 1;
            const std::size_t reach = width_ - 1;
            for (std::size_t j = from; j <= m; j++)
            {
                forward_[j] = kInf;
                rings_[j] = 0;
                const std::size_t first = j > reach ? j - reach : 0;
                for (std::size_t i = first; i < j; i++)
                {
                    const double cost = ring_cost_[i * width_ + (j - i)];
                    if ((i == 0 && j == m) || forward_[i] == kInf || cost == kInf)
                    {
                        continue;
                    }
                    const double c = forward_[i] + cost;
                    const std::size_t r = rings_[i] + 1;
                    if (better(c, r, forward_[j], rings_[j]))
                    {
                        forward_[j] = c;
                        rings_[j] = r;
                        pred_[j] = i;
                        drone_[j] = ring_drone_[i * width_ + (j - i)];
                    }
                }
            }

            closed_ = false;
            total_ = forward_[m];
            if (closed_ring_allowed(m))
            {
                const auto ring = best_ring(seq_, prefix_, 0, m);
                if (better(ring.cost, 1, total_, rings_[m]))
                {
                    total_ = ring.cost;
                    closed_ = true;
                    closed_drone_ = ring.drone;
                }
            }
        }

        // backward_[i] for i <= to.
        void backward_pass(std::size_t to)
        {
            const std::size_t m = seq_.size() - 1;
            const std::size_t reach = width_ - 1;
            for (std::size_t i = std::min(to, m - 1) + 1; i-- > 0;)
            {
                backward_[i] = kInf;
                const std::size_t last = reach >= m - i ? m : i + reach;
                for (std::size_t j = i + 1; j <= last; j++)
                {
                    if ((i == 0 && j == m) || backward_[j] == kInf)
                    {
                        continue;
                    }
                    backward_[i] = std::min(backward_[i], ring_cost_[i * width_ + (j - i)] + backward_[j]);
                }
            }
        }

        static bool better(double c, std::size_t r, double best_c, std::size_t best_r)
        {
            const double tol = 1e-12 * std::max(1.0, std::abs(best_c));
            if (best_c == kInf)
            {
                return c < kInf;
            }
            return c < best_c - tol || (c <= best_c + tol && r < best_r);
        }

        Ring make_ring(std::size_t i, std::size_t j, std::size_t drone) const
        {
            Ring r;
            r.start = seq_[i];
            r.end = seq_[j];
            for (std::size_t k = i + 1; k < j; k++)
            {
                if (k == drone)
                {
                    r.drone = seq_[k];
                }
                else
                {
                    r.truck.push_back(seq_[k]);
                }
            }
            return r;
        }

        const Dist *dist_;
        std::size_t max_ring_;
        bool allow_straight_;

        std::vector<std::size_t> seq_;
        std::vector<double> prefix_;
        std::vector<double> forward_;
        std::vector<std::size_t> rings_;
        std::vector<std::size_t> pred_;
        std::vector<std::size_t> drone_;
        std::vector<double> backward_;
        double total_ = kInf;
        bool closed_ = false;
        std::size_t closed_drone_ = kNoDrone;

        std::size_t width_ = 0;
        std::vector<double> ring_cost_; // [i * width_ + (j - i)]
        std::vector<std::size_t> ring_drone_;
        std::vector<std::size_t> pos_;

        mutable std::vector<std::size_t> local_seq_;
        mutable std::vector<std::size_t> orig_;
        mutable std::vector<std::size_t> up_;
        mutable std::vector<std::size_t> down_;
        mutable std::vector<double> local_prefix_;
        mutable std::vector<double> local_forward_;
    };
}
