#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace tspd
{
    enum class NormKind
    {
        l2,
        l1,
    };

    std::string_view to_string(NormKind norm);
    NormKind parse_norm_kind(std::string_view name);

    // Area of the radius-r ball: pi r^2 (l2), 2 r^2 (l1).
    double ball_area(NormKind norm, double r);

    // Plug-in values for the TSP constant.
    struct BetaPreset
    {
        std::string_view name;
        double beta;
    };

    inline constexpr BetaPreset kBetaPresets[] = {
        {"gaudio", 0.6277},       // proven lower bound, Euclidean
        {"empirical_l2", 0.71},   // empirical Euclidean estimate
        {"nn_l1", 0.78332},       // nearest-neighbour bound, rectilinear
        {"empirical_l1", 0.90},   // empirical rectilinear estimate
    };

    double beta_preset(std::string_view name);

    // TSP / (1 + alpha) <= TSPD, so beta / (1 + alpha) bounds the constant.
    double lb_ratio(double beta, double alpha);

    // Truck-node fraction at which the truck and drone terms of the
    // parametric bound balance.
    double rho_star(double beta, double alpha);

    // beta * sqrt(5 / (5 + 4 alpha beta)).
    double lb_param(double beta, double alpha);

    // Density of the distance from a fixed point to the nearest (order 1) or
    // second-nearest (order 2) point of a Poisson process of intensity n.
    double nn_pdf(NormKind norm, int order, double n, double r);

    double nn_expectation(NormKind norm, int order, double n);

    // Expected length of the two cheapest connections of a point, halved per
    // endpoint: (E1 + E2) / 2 at unit intensity.
    double tsp_nn_lower_constant(NormKind norm);

    // Drone-leg constant of the parametric bound: E1 + E2 at unit intensity
    // under l2.
    double drone_nn_constant();

    struct NnSample
    {
        NormKind norm;
        double intensity = 0.0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
        double nearest_mean = 0.0;
        double nearest_stderr = 0.0;
        double second_mean = 0.0;
        double second_stderr = 0.0;
        std::size_t redraws = 0;
    };

    /*
     * Monte Carlo check of the nearest-neighbour laws: each trial draws a
     * Poisson(100) number of uniform points in the window [-5/sqrt(n), 5/sqrt(n)]^2
     * (intensity n) and records the distances from the origin to the nearest and
     * second-nearest of them.  Trials with fewer than two points are redrawn.
     */
    NnSample sample_nn_distances(NormKind norm, double intensity, std::size_t trials, std::uint64_t seed,
                                 std::size_t workers = 0);

    // Truncation to 4 decimals, the convention for lower-bound tables.
    double truncate4(double x);
    double round4(double x);
}
