#include "tspd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "tspd/errors.hpp"

namespace tspd
{
    std::string_view to_string(TruckNorm norm)
    {
        return norm == TruckNorm::euclidean ? "euclidean" : "rectilinear";
    }

    TruckNorm parse_truck_norm(std::string_view name)
    {
        if (name == "euclidean")
        {
            return TruckNorm::euclidean;
        }
        // "mixed" is the CLI name of the rectilinear-truck / Euclidean-drone model.
        if (name == "rectilinear" || name == "mixed")
        {
            return TruckNorm::rectilinear;
        }
        throw ParameterError("unknown truck norm '" + std::string(name) + "'");
    }

    MetricPair::MetricPair(TruckNorm truck_norm, double alpha)
        : truck_norm_(truck_norm), alpha_(alpha)
    {
        if (!(alpha >= 1.0) || !std::isfinite(alpha))
        {
            throw ParameterError("drone speed ratio alpha must be >= 1, got " + std::to_string(alpha));
        }
    }

    double MetricPair::truck_norm_constant() const noexcept
    {
        return truck_norm_ == TruckNorm::euclidean ? 1.0 : std::sqrt(2.0);
    }

    Instance generate_instance(std::size_t n, std::uint64_t seed)
    {
        Instance inst;
        inst.seed = seed;
        inst.points.reserve(n);
        auto rng = make_stream(seed, {0x696e7374ULL});
        for (std::size_t i = 0; i < n; i++)
        {
            const double x = rng.uniform();
            const double y = rng.uniform();
            inst.points.push_back({x, y});
        }
        return inst;
    }

    double bounding_diameter(const std::vector<Point> &points)
    {
        if (points.empty())
        {
            return 0.0;
        }
        double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
        double y_lo = x_lo, y_hi = -x_lo;
        for (const auto &p : points)
        {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, p.y);
            y_hi = std::max(y_hi, p.y);
        }
        return std::hypot(x_hi - x_lo, y_hi - y_lo);
    }

    Instance load_instance(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw IoError(path, "cannot open instance file");
        }
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw IoError(path, std::string("malformed JSON: ") + e.what());
        }

        Instance inst;
        try
        {
            if (j.contains("seed") && !j.at("seed").is_null())
            {
                inst.seed = j.at("seed").get<std::uint64_t>();
            }
            for (const auto &p : j.at("points"))
            {
                if (!p.is_array() || p.size() != 2)
                {
                    throw IoError(path, "each point must be a [x, y] pair");
                }
                Point pt{p[0].get<double>(), p[1].get<double>()};
                if (!std::isfinite(pt.x) || !std::isfinite(pt.y))
                {
                    throw IoError(path, "non-finite coordinate");
                }
                inst.points.push_back(pt);
            }
            if (j.contains("n") && j.at("n").get<std::size_t>() != inst.points.size())
            {
                throw IoError(path, "field n disagrees with the number of points");
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw IoError(path, std::string("bad instance schema: ") + e.what());
        }
        return inst;
    }

    void save_instance(const Instance &inst, const std::string &path)
    {
        nlohmann::json j;
        j["n"] = inst.points.size();
        j["seed"] = inst.seed ? nlohmann::json(*inst.seed) : nlohmann::json(nullptr);
        auto pts = nlohmann::json::array();
        for (const auto &p : inst.points)
        {
            pts.push_back({p.x, p.y});
        }
        j["points"] = std::move(pts);

        std::ofstream out(path);
        if (!out)
        {
            throw IoError(path, "cannot open for writing");
        }
        out << j.dump(2) << '\n';
        if (!out)
        {
            throw IoError(path, "write failed");
        }
    }
}
