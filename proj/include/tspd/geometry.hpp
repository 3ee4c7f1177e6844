#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tspd/rng.hpp"

namespace tspd
{
    struct Point
    {
        double x = 0.0;
        double y = 0.0;

        friend bool operator==(const Point &, const Point &) = default;
    };

    enum class TruckNorm
    {
        euclidean,
        rectilinear,
    };

    std::string_view to_string(TruckNorm norm);
    TruckNorm parse_truck_norm(std::string_view name);

    // Truck travels under `truck_norm`; the drone always flies Euclidean at
    // `alpha` times the truck speed.
    class MetricPair
    {
    public:
        MetricPair(TruckNorm truck_norm, double alpha);

        TruckNorm truck_norm() const noexcept { return truck_norm_; }
        double alpha() const noexcept { return alpha_; }

        // ||p - q||_T <= truck_norm_constant() * ||p - q||_2
        double truck_norm_constant() const noexcept;

    private:
        TruckNorm truck_norm_;
        double alpha_;
    };

    inline double euclidean_dist(const Point &p, const Point &q) noexcept
    {
        return std::hypot(p.x - q.x, p.y - q.y);
    }

    inline double rectilinear_dist(const Point &p, const Point &q) noexcept
    {
        return std::abs(p.x - q.x) + std::abs(p.y - q.y);
    }

    inline double truck_dist(const MetricPair &m, const Point &p, const Point &q) noexcept
    {
        return m.truck_norm() == TruckNorm::euclidean ? euclidean_dist(p, q) : rectilinear_dist(p, q);
    }

    inline double drone_dist(const MetricPair &m, const Point &p, const Point &q) noexcept
    {
        return euclidean_dist(p, q) / m.alpha();
    }

    struct Instance
    {
        std::vector<Point> points;
        std::optional<std::uint64_t> seed;

        std::size_t size() const noexcept { return points.size(); }
    };

    // n i.i.d. Uniform[0,1]^2 points; x then y per point from one stream keyed by seed.
    Instance generate_instance(std::size_t n, std::uint64_t seed);

    // Length of the diagonal of the axis-aligned bounding box.
    double bounding_diameter(const std::vector<Point> &points);

    Instance load_instance(const std::string &path);
    void save_instance(const Instance &inst, const std::string &path);
}
