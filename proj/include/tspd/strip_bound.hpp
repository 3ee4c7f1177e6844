#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tspd/geometry.hpp"
#include "tspd/rng.hpp"

namespace tspd
{
    /*
     * Strip-construction upper bounds on the TSPD constant.
     *
     * The unit square is cut into horizontal strips of height h / sqrt(n) and
     * the points of each strip are taken left to right in blocks of k.  After
     * rescaling, a block is k - 1 Exponential(1) horizontal gaps z and k
     * Uniform[0,1] heights u, and the distance between block points i and j is
     *
     *     L_ij = sqrt((W_j - W_i)^2 + h^4 (u_i - u_j)^2),   W_0 = 0, W_i = z_1 + ... + z_i.
     *
     * Each block pattern covers k - 1 new points at cost C_k, so
     * E[C_k] / ((k - 1) h) bounds the constant for every h > 0.
     */

    enum class PatternKind
    {
        straight = 2,
        triangle = 3,
        quartet = 4,
        five = 5,
    };

    inline constexpr std::size_t block_size(PatternKind p) noexcept { return static_cast<std::size_t>(p); }

    std::string_view to_string(PatternKind p);
    PatternKind parse_pattern(std::string_view name);

    struct StripBlock
    {
        std::vector<double> z; // k - 1 gaps
        std::vector<double> u; // k heights

        std::size_t k() const noexcept { return u.size(); }
    };

    StripBlock sample_block(std::size_t k, Xoshiro256 &rng);

    // Unscaled pairwise lengths of one block, computed once per (block, h).
    class PairLengths
    {
    public:
        static constexpr std::size_t kMaxPoints = 5;

        PairLengths(std::span<const double> z, std::span<const double> u, double h);
        explicit PairLengths(const StripBlock &b, double h) : PairLengths(b.z, b.u, h) {}

        double operator()(std::size_t i, std::size_t j) const noexcept { return l_[i][j]; }

    private:
        std::array<std::array<double, kMaxPoints>, kMaxPoints> l_{};
    };

    double pair_length(const StripBlock &b, double h, std::size_t i, std::size_t j);

    // Triangle(i, j; k): truck i -> j, drone i -> k -> j.
    inline double triangle_term(const PairLengths &L, std::size_t i, std::size_t j, std::size_t k, double alpha) noexcept
    {
        const double truck = L(i, j);
        const double drone = (L(i, k) + L(k, j)) / alpha;
        return truck > drone ? truck : drone;
    }

    // Quintet(i, a, b, j; k): truck i -> a -> b -> j, drone i -> k -> j.
    inline double quintet_term(const PairLengths &L, std::size_t i, std::size_t a, std::size_t b, std::size_t j,
                               std::size_t k, double alpha) noexcept
    {
        const double truck = L(i, a) + L(a, b) + L(b, j);
        const double drone = (L(i, k) + L(k, j)) / alpha;
        return truck > drone ? truck : drone;
    }

    double cost_straight(const StripBlock &b, double h);
    double cost_triangle(const StripBlock &b, double h, double alpha);
    double cost_quartet(const StripBlock &b, double h, double alpha);
    double cost_five(const StripBlock &b, double h, double alpha);

    // The twelve candidate costs of a five-point block: six Triangle+Triangle
    // sums followed by six Quintets, in the order listed in strip_bound.cpp.
    std::array<double, 12> five_point_terms(const PairLengths &L, double alpha);

    double pattern_cost(PatternKind p, const PairLengths &L, double alpha);

    struct BoundEstimate
    {
        PatternKind pattern = PatternKind::straight;
        double alpha = 1.0;
        double h = 0.0;
        double mean = 0.0;
        double std_error = 0.0;
        std::size_t samples = 0;
        std::uint64_t seed = 0;
        // optimize_h only: the minimiser sits on the search bracket.
        bool boundary = false;
    };

    // Samples are drawn in fixed chunks of this many blocks; chunk c uses the
    // stream derive_seed(seed, {c}).  Part of the reproducibility contract.
    inline constexpr std::size_t kSamplesPerChunk = 1u << 16;

    BoundEstimate estimate_bound(PatternKind p, const MetricPair &m, double h, std::size_t n_samples,
                                 std::uint64_t seed, std::size_t workers = 0);

    BoundEstimate estimate_bound(PatternKind p, double alpha, double h, std::size_t n_samples, std::uint64_t seed,
                                 std::size_t workers = 0);

    struct HSearch
    {
        double h_lo = 0.5;
        double h_hi = 4.0;
        double tolerance = 1e-3;
    };

    /*
     * Minimises h -> mean of C_k / ((k - 1) h) over one fixed set of blocks
     * (common random numbers) by golden-section search, then reports the
     * estimate at the minimiser.  The blocks are the ones estimate_bound
     * draws for the same (seed, n_samples), so the result equals
     * estimate_bound(p, alpha, result.h, n_samples, seed).
     */
    BoundEstimate optimize_h(PatternKind p, const MetricPair &m, std::size_t n_samples, std::uint64_t seed,
                             HSearch search = {}, std::size_t workers = 0);

    BoundEstimate optimize_h(PatternKind p, double alpha, std::size_t n_samples, std::uint64_t seed,
                             HSearch search = {}, std::size_t workers = 0);

    class BlockSet;

    // Same search over caller-owned blocks, so several alphas can share one draw.
    BoundEstimate optimize_h(const BlockSet &blocks, const MetricPair &m, HSearch search = {},
                             std::size_t workers = 0);

    // Pre-drawn blocks for repeated evaluation at different h.
    class BlockSet
    {
    public:
        BlockSet(PatternKind p, std::size_t n_samples, std::uint64_t seed, std::size_t workers = 0);

        PatternKind pattern() const noexcept { return pattern_; }
        std::size_t samples() const noexcept { return samples_; }

        // Mean and standard error of C_k / ((k - 1) h).
        BoundEstimate evaluate(double h, double alpha, std::size_t workers = 0) const;

    private:
        PatternKind pattern_;
        std::size_t samples_;
        std::uint64_t seed_;
        // chunk-major; per block z_1..z_{k-1} then u_0..u_{k-1}
        std::vector<std::vector<double>> chunks_;
    };
}
