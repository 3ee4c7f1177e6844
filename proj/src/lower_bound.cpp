#include "tspd/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tspd/errors.hpp"
#include "tspd/parallel.hpp"
#include "tspd/rng.hpp"
#include "tspd/stats.hpp"

namespace tspd
{
    std::string_view to_string(NormKind norm)
    {
        return norm == NormKind::l2 ? "l2" : "l1";
    }

    NormKind parse_norm_kind(std::string_view name)
    {
        if (name == "l2")
        {
            return NormKind::l2;
        }
        if (name == "l1")
        {
            return NormKind::l1;
        }
        throw ParameterError("unknown norm '" + std::string(name) + "' (l1|l2)");
    }

    double ball_area(NormKind norm, double r)
    {
        return norm == NormKind::l2 ? std::numbers::pi * r * r : 2.0 * r * r;
    }

    double beta_preset(std::string_view name)
    {
        for (const auto &p : kBetaPresets)
        {
            if (p.name == name)
            {
                return p.beta;
            }
        }
        throw ParameterError("unknown beta preset '" + std::string(name) + "'");
    }

    namespace
    {
        void check_inputs(double beta, double alpha)
        {
            if (!(beta > 0.0) || !std::isfinite(beta))
            {
                throw ParameterError("beta must be positive");
            }
            if (!(alpha >= 1.0) || !std::isfinite(alpha))
            {
                throw ParameterError("alpha must be >= 1");
            }
        }

        void check_order(int order)
        {
            if (order != 1 && order != 2)
            {
                throw ParameterError("nearest-neighbour order must be 1 or 2");
            }
        }

        double ball_area_derivative(NormKind norm, double r)
        {
            return norm == NormKind::l2 ? 2.0 * std::numbers::pi * r : 4.0 * r;
        }

        double norm_of(NormKind norm, double x, double y)
        {
            return norm == NormKind::l2 ? std::hypot(x, y) : std::abs(x) + std::abs(y);
        }

        // Inversion from the mode-free left tail; fine for the fixed mean of 100.
        std::size_t poisson(Xoshiro256 &rng, double mean)
        {
            const double u = rng.uniform();
            double p = std::exp(-mean);
            double cdf = p;
            std::size_t k = 0;
            while (u >= cdf && k < 100000)
            {
                k++;
                p *= mean / static_cast<double>(k);
                cdf += p;
            }
            return k;
        }
    }

    double lb_ratio(double beta, double alpha)
    {
        check_inputs(beta, alpha);
        return beta / (1.0 + alpha);
    }

    double drone_nn_constant()
    {
        return nn_expectation(NormKind::l2, 1, 1.0) + nn_expectation(NormKind::l2, 2, 1.0);
    }

    double rho_star(double beta, double alpha)
    {
        check_inputs(beta, alpha);
        // beta sqrt(rho) = (c / alpha) (1 - rho) / sqrt(rho)  <=>  rho = c / (c + alpha beta)
        const double c = drone_nn_constant();
        return c / (c + alpha * beta);
    }

    double lb_param(double beta, double alpha)
    {
        return beta * std::sqrt(rho_star(beta, alpha));
    }

    double nn_pdf(NormKind norm, int order, double n, double r)
    {
        check_order(order);
        if (!(n > 0.0))
        {
            throw ParameterError("intensity must be positive");
        }
        if (r < 0.0)
        {
            throw ParameterError("distance must be non-negative");
        }
        const double mass = n * ball_area(norm, r);
        const double first = n * ball_area_derivative(norm, r) * std::exp(-mass);
        return order == 1 ? first : first * mass;
    }

    double nn_expectation(NormKind norm, int order, double n)
    {
        check_order(order);
        if (!(n > 0.0))
        {
            throw ParameterError("intensity must be positive");
        }
        const double root_n = std::sqrt(n);
        if (norm == NormKind::l2)
        {
            return order == 1 ? 1.0 / (2.0 * root_n) : 3.0 / (4.0 * root_n);
        }
        const double s = std::sqrt(2.0 * std::numbers::pi);
        return order == 1 ? s / (4.0 * root_n) : 3.0 * s / (8.0 * root_n);
    }

    double tsp_nn_lower_constant(NormKind norm)
    {
        // Every point sends its two cheapest edges; each tour edge is counted twice.
        return 0.5 * (nn_expectation(norm, 1, 1.0) + nn_expectation(norm, 2, 1.0));
    }

    NnSample sample_nn_distances(NormKind norm, double intensity, std::size_t trials, std::uint64_t seed,
                                 std::size_t workers)
    {
        if (!(intensity > 0.0))
        {
            throw ParameterError("intensity must be positive");
        }
        if (trials < 100)
        {
            throw ParameterError("at least 100 trials are required");
        }

        constexpr std::size_t kTrialsPerChunk = 4096;
        const double half = 5.0 / std::sqrt(intensity);
        const double expected_points = intensity * (2.0 * half) * (2.0 * half);
        const std::size_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;

        struct Part
        {
            RunningStats nearest, second;
            std::size_t redraws = 0;
        };
        std::vector<Part> parts(chunks);
        parallel_for(chunks, workers, [&](std::size_t c) {
            auto rng = make_stream(seed, {0x6e6eULL, c});
            const std::size_t len = std::min(kTrialsPerChunk, trials - c * kTrialsPerChunk);
            Part part;
            for (std::size_t t = 0; t < len; t++)
            {
                std::size_t count = poisson(rng, expected_points);
                while (count < 2)
                {
                    part.redraws++;
                    count = poisson(rng, expected_points);
                }
                double d1 = INFINITY, d2 = INFINITY;
                for (std::size_t i = 0; i < count; i++)
                {
                    const double x = (2.0 * rng.uniform() - 1.0) * half;
                    const double y = (2.0 * rng.uniform() - 1.0) * half;
                    const double d = norm_of(norm, x, y);
                    if (d < d1)
                    {
                        d2 = d1;
                        d1 = d;
                    }
                    else if (d < d2)
                    {
                        d2 = d;
                    }
                }
                part.nearest.add(d1);
                part.second.add(d2);
            }
            parts[c] = part;
        });

        NnSample out{norm, intensity, trials, seed};
        RunningStats nearest, second;
        for (const auto &p : parts)
        {
            nearest.merge(p.nearest);
            second.merge(p.second);
            out.redraws += p.redraws;
        }
        out.nearest_mean = nearest.mean();
        out.nearest_stderr = nearest.stderr_of_mean();
        out.second_mean = second.mean();
        out.second_stderr = second.stderr_of_mean();
        return out;
    }

    double truncate4(double x)
    {
        return std::floor(x * 1e4 + 1e-9) / 1e4;
    }

    double round4(double x)
    {
        return std::round(x * 1e4) / 1e4;
    }
}
