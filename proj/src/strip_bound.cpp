#include "tspd/strip_bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tspd/errors.hpp"
#include "tspd/parallel.hpp"
#include "tspd/stats.hpp"

namespace tspd
{
    std::string_view to_string(PatternKind p)
    {
        switch (p)
        {
        case PatternKind::straight:
            return "straight";
        case PatternKind::triangle:
            return "triangle";
        case PatternKind::quartet:
            return "quartet";
        case PatternKind::five:
            return "five";
        }
        return "unknown";
    }

    PatternKind parse_pattern(std::string_view name)
    {
        for (auto p : {PatternKind::straight, PatternKind::triangle, PatternKind::quartet, PatternKind::five})
        {
            if (name == to_string(p))
            {
                return p;
            }
        }
        throw ParameterError("unknown pattern '" + std::string(name) + "' (straight|triangle|quartet|five)");
    }

    namespace
    {
        void draw_block(std::size_t k, Xoshiro256 &rng, double *z, double *u)
        {
            for (std::size_t i = 0; i + 1 < k; i++)
            {
                z[i] = rng.exponential();
            }
            for (std::size_t i = 0; i < k; i++)
            {
                u[i] = rng.uniform();
            }
        }

        std::size_t chunk_count(std::size_t n_samples)
        {
            return (n_samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
        }

        std::size_t chunk_length(std::size_t n_samples, std::size_t c)
        {
            return std::min(kSamplesPerChunk, n_samples - c * kSamplesPerChunk);
        }

        void check_h(double h)
        {
            if (!(h > 0.0) || !std::isfinite(h))
            {
                throw ParameterError("strip height parameter h must be positive, got " + std::to_string(h));
            }
        }

        void check_request(const MetricPair &m, std::size_t n_samples)
        {
            if (m.truck_norm() != TruckNorm::euclidean)
            {
                throw UnsupportedFeature("strip upper bounds are only available for the speed-scaled Euclidean model");
            }
            if (n_samples < 2)
            {
                throw ParameterError("at least 2 samples are required for a standard error");
            }
        }

        BoundEstimate finish(PatternKind p, double alpha, double h, std::size_t n_samples, std::uint64_t seed,
                             const std::vector<RunningStats> &parts)
        {
            RunningStats total;
            for (const auto &s : parts)
            {
                total.merge(s);
            }
            BoundEstimate e;
            e.pattern = p;
            e.alpha = alpha;
            e.h = h;
            e.mean = total.mean();
            e.std_error = total.stderr_of_mean();
            e.samples = total.count();
            e.seed = seed;
            (void)n_samples;
            return e;
        }
    }

    StripBlock sample_block(std::size_t k, Xoshiro256 &rng)
    {
        if (k < 2)
        {
            throw ParameterError("a strip block needs k >= 2 points");
        }
        StripBlock b;
        b.z.resize(k - 1);
        b.u.resize(k);
        draw_block(k, rng, b.z.data(), b.u.data());
        return b;
    }

    PairLengths::PairLengths(std::span<const double> z, std::span<const double> u, double h)
    {
        const std::size_t k = u.size();
        if (k > kMaxPoints || z.size() + 1 != k)
        {
            throw ParameterError("strip block must have k <= 5 heights and k - 1 gaps");
        }
        const double h4 = h * h * h * h;
        std::array<double, kMaxPoints> w{};
        for (std::size_t i = 1; i < k; i++)
        {
            w[i] = w[i - 1] + z[i - 1];
        }
        for (std::size_t i = 0; i < k; i++)
        {
            for (std::size_t j = i + 1; j < k; j++)
            {
                const double dx = w[j] - w[i];
                const double dy = u[i] - u[j];
                l_[i][j] = l_[j][i] = std::sqrt(dx * dx + h4 * dy * dy);
            }
        }
    }

    double pair_length(const StripBlock &b, double h, std::size_t i, std::size_t j)
    {
        if (i >= b.k() || j >= b.k())
        {
            throw IndexError("block index out of range");
        }
        return PairLengths(b, h)(i, j);
    }

    namespace
    {
        double straight_cost(const PairLengths &L) { return L(0, 1); }

        double triangle_cost(const PairLengths &L, double alpha) { return triangle_term(L, 0, 2, 1, alpha); }

        // min over the two drone choices of max{truck, drone / alpha}, which
        // collapses to max{T_min, T_max / alpha}.
        double quartet_cost(const PairLengths &L, double alpha)
        {
            const double a = L(0, 1) + L(1, 3);
            const double b = L(0, 2) + L(2, 3);
            const double t_min = std::min(a, b);
            const double t_max = std::max(a, b);
            return std::max(t_min, t_max / alpha);
        }

        double five_cost(const PairLengths &L, double alpha)
        {
            const auto terms = five_point_terms(L, alpha);
            return *std::min_element(terms.begin(), terms.end());
        }

        void check_block(const StripBlock &b, std::size_t k)
        {
            if (b.k() != k || b.z.size() + 1 != k)
            {
                throw ParameterError("expected a " + std::to_string(k) + "-point block");
            }
        }
    }

    std::array<double, 12> five_point_terms(const PairLengths &L, double alpha)
    {
        return {
            triangle_term(L, 0, 1, 2, alpha) + triangle_term(L, 1, 4, 3, alpha),
            triangle_term(L, 0, 1, 3, alpha) + triangle_term(L, 1, 4, 2, alpha),
            triangle_term(L, 0, 2, 1, alpha) + triangle_term(L, 2, 4, 3, alpha),
            triangle_term(L, 0, 2, 3, alpha) + triangle_term(L, 2, 4, 1, alpha),
            triangle_term(L, 0, 3, 1, alpha) + triangle_term(L, 3, 4, 2, alpha),
            triangle_term(L, 0, 3, 2, alpha) + triangle_term(L, 3, 4, 1, alpha),
            quintet_term(L, 0, 1, 3, 4, 2, alpha),
            quintet_term(L, 0, 3, 1, 4, 2, alpha),
            quintet_term(L, 0, 1, 2, 4, 3, alpha),
            quintet_term(L, 0, 2, 1, 4, 3, alpha),
            quintet_term(L, 0, 2, 3, 4, 1, alpha),
            quintet_term(L, 0, 3, 2, 4, 1, alpha),
        };
    }

    double pattern_cost(PatternKind p, const PairLengths &L, double alpha)
    {
        switch (p)
        {
        case PatternKind::straight:
            return straight_cost(L);
        case PatternKind::triangle:
            return triangle_cost(L, alpha);
        case PatternKind::quartet:
            return quartet_cost(L, alpha);
        case PatternKind::five:
            return five_cost(L, alpha);
        }
        return 0.0;
    }

    double cost_straight(const StripBlock &b, double h)
    {
        check_block(b, 2);
        return straight_cost(PairLengths(b, h));
    }

    double cost_triangle(const StripBlock &b, double h, double alpha)
    {
        check_block(b, 3);
        return triangle_cost(PairLengths(b, h), alpha);
    }

    double cost_quartet(const StripBlock &b, double h, double alpha)
    {
        check_block(b, 4);
        return quartet_cost(PairLengths(b, h), alpha);
    }

    double cost_five(const StripBlock &b, double h, double alpha)
    {
        check_block(b, 5);
        return five_cost(PairLengths(b, h), alpha);
    }

    BoundEstimate estimate_bound(PatternKind p, const MetricPair &m, double h, std::size_t n_samples,
                                 std::uint64_t seed, std::size_t workers)
    {
        check_h(h);
        check_request(m, n_samples);

        const std::size_t k = block_size(p);
        const double scale = 1.0 / (static_cast<double>(k - 1) * h);
        const double alpha = m.alpha();
        std::vector<RunningStats> parts(chunk_count(n_samples));
        parallel_for(parts.size(), workers, [&](std::size_t c) {
            auto rng = make_stream(seed, {c});
            std::array<double, PairLengths::kMaxPoints> z{}, u{};
            RunningStats acc;
            const std::size_t len = chunk_length(n_samples, c);
            for (std::size_t s = 0; s < len; s++)
            {
                draw_block(k, rng, z.data(), u.data());
                const PairLengths L(std::span(z.data(), k - 1), std::span(u.data(), k), h);
                acc.add(pattern_cost(p, L, alpha) * scale);
            }
            parts[c] = acc;
        });
        return finish(p, alpha, h, n_samples, seed, parts);
    }

    BoundEstimate estimate_bound(PatternKind p, double alpha, double h, std::size_t n_samples, std::uint64_t seed,
                                 std::size_t workers)
    {
        return estimate_bound(p, MetricPair(TruckNorm::euclidean, alpha), h, n_samples, seed, workers);
    }

    BlockSet::BlockSet(PatternKind p, std::size_t n_samples, std::uint64_t seed, std::size_t workers)
        : pattern_(p), samples_(n_samples), seed_(seed), chunks_(chunk_count(n_samples))
    {
        const std::size_t k = block_size(p);
        const std::size_t stride = 2 * k - 1;
        parallel_for(chunks_.size(), workers, [&](std::size_t c) {
            auto rng = make_stream(seed, {c});
            const std::size_t len = chunk_length(n_samples, c);
            auto &data = chunks_[c];
            data.resize(len * stride);
            for (std::size_t s = 0; s < len; s++)
            {
                double *block = data.data() + s * stride;
                draw_block(k, rng, block, block + (k - 1));
            }
        });
    }

    BoundEstimate BlockSet::evaluate(double h, double alpha, std::size_t workers) const
    {
        check_h(h);
        const std::size_t k = block_size(pattern_);
        const std::size_t stride = 2 * k - 1;
        const double scale = 1.0 / (static_cast<double>(k - 1) * h);
        std::vector<RunningStats> parts(chunks_.size());
        parallel_for(chunks_.size(), workers, [&](std::size_t c) {
            const auto &data = chunks_[c];
            RunningStats acc;
            for (std::size_t off = 0; off < data.size(); off += stride)
            {
                const double *block = data.data() + off;
                const PairLengths L(std::span(block, k - 1), std::span(block + k - 1, k), h);
                acc.add(pattern_cost(pattern_, L, alpha) * scale);
            }
            parts[c] = acc;
        });
        return finish(pattern_, alpha, h, samples_, seed_, parts);
    }

    BoundEstimate optimize_h(PatternKind p, const MetricPair &m, std::size_t n_samples, std::uint64_t seed,
                             HSearch search, std::size_t workers)
    {
        check_request(m, n_samples);
        if (!(search.h_lo > 0.0) || !(search.h_hi > search.h_lo) || !(search.tolerance > 0.0))
        {
            throw ParameterError("h search bracket must satisfy 0 < h_lo < h_hi");
        }

        const BlockSet blocks(p, n_samples, seed, workers);
        return optimize_h(blocks, m, search, workers);
    }

    BoundEstimate optimize_h(const BlockSet &blocks, const MetricPair &m, HSearch search, std::size_t workers)
    {
        check_request(m, blocks.samples());
        if (!(search.h_lo > 0.0) || !(search.h_hi > search.h_lo) || !(search.tolerance > 0.0))
        {
            throw ParameterError("h search bracket must satisfy 0 < h_lo < h_hi");
        }
        auto objective = [&](double h) { return blocks.evaluate(h, m.alpha(), workers).mean; };

        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = search.h_lo, b = search.h_hi;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = objective(c), fd = objective(d);
        while (b - a > search.tolerance)
        {
            if (fc <= fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = objective(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = objective(d);
            }
        }
        const double h_star = fc <= fd ? c : d;

        auto best = blocks.evaluate(h_star, m.alpha(), workers);
        best.boundary = (h_star - search.h_lo) <= search.tolerance || (search.h_hi - h_star) <= search.tolerance;
        return best;
    }

    BoundEstimate optimize_h(PatternKind p, double alpha, std::size_t n_samples, std::uint64_t seed, HSearch search,
                             std::size_t workers)
    {
        return optimize_h(p, MetricPair(TruckNorm::euclidean, alpha), n_samples, seed, search, workers);
    }
}
