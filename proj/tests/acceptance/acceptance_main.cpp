// Acceptance checks.  Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tspd/experiment.hpp"
#include "tspd/lower_bound.hpp"
#include "tspd/solvers.hpp"
#include "tspd/strip_bound.hpp"

using namespace tspd;

namespace
{
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    // Collects failure messages for one criterion; the first few are printed.
    struct Checker
    {
        std::vector<std::string> failures;
        std::vector<std::string> notes;

        void expect(bool ok, const std::string &what)
        {
            if (!ok)
            {
                failures.push_back(what);
            }
        }
        void note(const std::string &what) { notes.push_back(what); }
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    const std::vector<double> kAlphas{1.0, 1.5, 2.0, 2.5, 3.0};
    constexpr std::uint64_t kSeed = 1;

    // One upper-bound cell: optimize_h at the given sample count, timed.
    void upper_cell(Checker &c, PatternKind p, double alpha, std::size_t samples, double target, double tol,
                    double time_limit, bool check_h)
    {
        const auto t0 = Clock::now();
        const auto est = optimize_h(p, alpha, samples, kSeed);
        const double secs = seconds_since(t0);
        const std::string cell = fmt("%s alpha=%g", std::string(to_string(p)).c_str(), alpha);
        c.note(fmt("%s: mean %.5f (target %.4f) h* %.3f, %.1f s", cell.c_str(), est.mean, target, est.h, secs));
        c.expect(std::abs(est.mean - target) <= tol,
                 fmt("%s: mean %.5f outside %.4f +- %.3f", cell.c_str(), est.mean, target, tol));
        if (check_h)
        {
            c.expect(est.h >= 1.60 && est.h <= 1.90, fmt("%s: h* %.4f outside [1.60, 1.90]", cell.c_str(), est.h));
        }
        if (time_limit > 0.0)
        {
            c.expect(secs < time_limit, fmt("%s: %.1f s exceeds %.0f s", cell.c_str(), secs, time_limit));
        }
    }

    void criterion1(Checker &c)
    {
        for (double a : kAlphas)
        {
            upper_cell(c, PatternKind::straight, a, 2'000'000, 0.9212, 0.003, 60.0, true);
        }
    }

    void criterion2(Checker &c)
    {
        const double expected[] = {0.9211, 0.7423, 0.6905, 0.6670, 0.6548};
        for (std::size_t i = 0; i < kAlphas.size(); i++)
        {
            upper_cell(c, PatternKind::triangle, kAlphas[i], 2'000'000, expected[i], 0.005, 0.0, false);
        }
    }

    void criterion3(Checker &c)
    {
        upper_cell(c, PatternKind::quartet, 1.0, 2'000'000, 0.8316, 0.006, 0.0, false);
        upper_cell(c, PatternKind::quartet, 2.0, 2'000'000, 0.6567, 0.006, 0.0, false);
    }

    void criterion4(Checker &c)
    {
        upper_cell(c, PatternKind::five, 2.0, 1'000'000, 0.6130, 0.008, 120.0, false);
        upper_cell(c, PatternKind::five, 3.0, 1'000'000, 0.5615, 0.008, 120.0, false);
    }

    void criterion5(Checker &c)
    {
        auto exact4 = [&](const char *name, double got, double want) {
            // compare the 4-decimal integers so no tolerance is involved
            const long g = std::lround(got * 1e4), w = std::lround(want * 1e4);
            c.expect(g == w, fmt("%s = %.4f, expected %.4f", name, got, want));
        };
        exact4("lb_param(0.6277, 2)", truncate4(lb_param(0.6277, 2.0)), 0.4433);
        exact4("lb_param(0.71, 2)", truncate4(lb_param(0.71, 2.0)), 0.4858);
        exact4("lb_param(0.7833, 2)", truncate4(lb_param(0.7833, 2.0)), 0.5218);
        exact4("lb_ratio(0.6277, 2)", truncate4(lb_ratio(0.6277, 2.0)), 0.2092);
        const double row[] = {0.5670, 0.5217, 0.4858, 0.4564, 0.4317};
        for (std::size_t i = 0; i < kAlphas.size(); i++)
        {
            exact4(fmt("lb_param(0.71, %g)", kAlphas[i]).c_str(), truncate4(lb_param(0.71, kAlphas[i])), row[i]);
        }
    }

    void criterion6(Checker &c)
    {
        std::uint64_t seed = 100;
        for (auto norm : {NormKind::l2, NormKind::l1})
        {
            for (double n : {1.0, 4.0, 25.0})
            {
                const auto s = sample_nn_distances(norm, n, 100'000, seed++);
                const double e1 = nn_expectation(norm, 1, n), e2 = nn_expectation(norm, 2, n);
                const double z1 = (s.nearest_mean - e1) / s.nearest_stderr;
                const double z2 = (s.second_mean - e2) / s.second_stderr;
                const std::string cell = fmt("%s n=%g", std::string(to_string(norm)).c_str(), n);
                c.note(fmt("%s: nearest z=%+.2f, second z=%+.2f", cell.c_str(), z1, z2));
                c.expect(std::abs(z1) <= 3.0, fmt("%s: nearest mean %.6f vs %.6f (z=%.2f)", cell.c_str(),
                                                  s.nearest_mean, e1, z1));
                c.expect(std::abs(z2) <= 3.0, fmt("%s: second mean %.6f vs %.6f (z=%.2f)", cell.c_str(),
                                                  s.second_mean, e2, z2));
            }
        }
    }

    std::vector<std::size_t> shuffled(std::size_t n, Xoshiro256 &rng)
    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; i--)
        {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        }
        return order;
    }

    void criterion7(Checker &c)
    {
        // partition DP against enumeration of every cut set and drone choice
        auto rng = make_stream(7, {1});
        std::size_t dp_checks = 0;
        for (int t = 0; t < 100; t++)
        {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
            const auto inst = generate_instance(n, 7000 + t);
            const auto order = shuffled(n, rng);
            const double alpha = 1.0 + 3.0 * rng.uniform();
            for (auto norm : {TruckNorm::euclidean, TruckNorm::rectilinear})
            {
                const MetricPair m(norm, alpha);
                const Tour tour{order, tour_length(order, inst, norm)};
                const auto sol = partition_dp(tour, inst, m, kUnboundedRing);
                const double got = makespan(sol, inst, m);
                const double want = oracle::brute_partition(order, inst, m, kUnboundedRing);
                c.expect(std::abs(got - want) <= 1e-9,
                         fmt("instance %d n=%zu %s: dp %.12f vs enumeration %.12f", t, n,
                             std::string(to_string(norm)).c_str(), got, want));
                dp_checks++;
            }
        }
        c.note(fmt("%zu partition checks", dp_checks));

        // heuristic against the exact solver, default configuration
        std::size_t matches = 0;
        for (int t = 0; t < 100; t++)
        {
            const std::size_t n = 4 + static_cast<std::size_t>(t % 5);
            const auto inst = generate_instance(n, 8000 + t);
            const MetricPair m(t % 2 ? TruckNorm::rectilinear : TruckNorm::euclidean, 1.0 + (t % 3));
            const double exact = tspd_exact(inst, m).makespan;
            const double heur = tspd_heuristic(inst, m, 9000 + t).makespan;
            c.expect(heur >= exact - 1e-9, fmt("instance %d: heuristic %.12f beats exact %.12f", t, heur, exact));
            if (heur <= exact + 1e-9)
            {
                matches++;
            }
        }
        c.note(fmt("heuristic matches exact on %zu/100", matches));
        c.expect(matches >= 90, fmt("heuristic matched exact on only %zu/100", matches));
    }

    Instance subset(const Instance &inst, const std::function<bool(const Point &)> &keep)
    {
        Instance out;
        for (const auto &p : inst.points)
        {
            if (keep(p))
            {
                out.points.push_back(p);
            }
        }
        return out;
    }

    double tspd_value(const Instance &inst, const MetricPair &m)
    {
        return inst.size() < 2 ? 0.0 : tspd_exact(inst, m).makespan;
    }

    void criterion8(Checker &c)
    {
        constexpr double eps = 1e-9;
        const double diam_q = std::sqrt(2.0); // the unit square
        for (auto norm : {TruckNorm::euclidean, TruckNorm::rectilinear})
        {
            const std::string metric(norm == TruckNorm::euclidean ? "euclidean" : "mixed");
            std::size_t upper = 0, lower = 0, lower_alt = 0, straight_gap = 0, mono = 0, mono_checks = 0, subadd = 0;
            double worst_lower = 0.0, worst_mono = 0.0;
            for (double alpha : {1.0, 2.0, 3.0})
            {
                const MetricPair m(norm, alpha);
                const std::string combo = fmt("%s alpha=%g", metric.c_str(), alpha);
                auto rng = make_stream(8, {static_cast<std::uint64_t>(norm), static_cast<std::uint64_t>(alpha)});
                for (int t = 0; t < 100; t++)
                {
                    const std::size_t n = 4 + static_cast<std::size_t>(t % 5);
                    const auto inst = generate_instance(n, 10'000 + t);
                    const std::string where = fmt("%s instance %d (n=%zu)", combo.c_str(), t, n);
                    const double tspd = tspd_exact(inst, m).makespan;
                    const double tsp = tsp_exact(inst, norm).length;

                    if (tspd > tsp + eps)
                    {
                        upper++;
                        c.expect(false, fmt("%s: TSPD %.9f above TSP %.9f", where.c_str(), tspd, tsp));
                    }
                    if (tsp / (1.0 + alpha) > tspd + eps)
                    {
                        lower++;
                        worst_lower = std::max(worst_lower, tsp / (1.0 + alpha) / tspd - 1.0);
                        c.expect(false, fmt("%s: TSP/(1+alpha) %.9f above TSPD %.9f", where.c_str(),
                                            tsp / (1.0 + alpha), tspd));
                    }
                    if (norm == TruckNorm::rectilinear)
                    {
                        // diagnostic only: the lower bounds that hold with Euclidean drone legs
                        const double tsp_l2 = tsp_exact(inst, TruckNorm::euclidean).length;
                        if (tsp_l2 / (1.0 + alpha) > tspd + eps || tsp / (1.0 + std::sqrt(2.0) * alpha) > tspd + eps)
                        {
                            lower_alt++;
                        }
                    }

                    const double no_straight = tspd_exact(inst, m, {.allow_straight = false}).makespan;
                    if (std::abs(no_straight - tspd) > eps)
                    {
                        straight_gap++;
                        c.expect(false, fmt("%s: no-straight optimum %.12f vs %.12f", where.c_str(), no_straight,
                                            tspd));
                    }

                    if (n <= 7)
                    {
                        Instance bigger = inst;
                        const double x = rng.uniform();
                        bigger.points.push_back({x, rng.uniform()});
                        const double grown = tspd_exact(bigger, m).makespan;
                        mono_checks++;
                        if (grown < tspd - eps)
                        {
                            mono++;
                            worst_mono = std::max(worst_mono, 1.0 - grown / tspd);
                            c.expect(false, fmt("%s: adding a point lowers %.9f to %.9f", where.c_str(), tspd,
                                                grown));
                        }
                    }

                    const auto left = subset(inst, [](const Point &p) { return p.x < 0.5; });
                    const auto right = subset(inst, [](const Point &p) { return p.x >= 0.5; });
                    const double rhs =
                        tspd_value(left, m) + tspd_value(right, m) + 4.0 * m.truck_norm_constant() * diam_q;
                    if (tspd > rhs + eps)
                    {
                        subadd++;
                        c.expect(false, fmt("%s: subadditivity %.9f > %.9f", where.c_str(), tspd, rhs));
                    }
                }
            }
            c.note(fmt("%s, 300 instances: TSPD<=TSP violations %zu; TSP/(1+alpha)<=TSPD violations %zu "
                       "(worst excess %.1f%%)",
                       metric.c_str(), upper, lower, 100.0 * worst_lower));
            if (norm == TruckNorm::rectilinear)
            {
                c.note(fmt("mixed: Euclidean-TSP/(1+alpha) and TSP/(1+sqrt(2)alpha) violations %zu", lower_alt));
            }
            c.note(fmt("%s: no-straight mismatches %zu; monotonicity violations %zu/%zu (worst drop %.1f%%); "
                       "subadditivity violations %zu",
                       metric.c_str(), straight_gap, mono, mono_checks, 100.0 * worst_mono, subadd));
        }
    }

    void criterion9(Checker &c)
    {
        const auto t0 = Clock::now();
        ExperimentConfig by_alpha;
        by_alpha.alphas = {1.0, 2.0, 3.0};
        by_alpha.sizes = {500};
        by_alpha.instances_per_cell = 30;
        by_alpha.seed = kSeed;
        const auto a_rows = run_empirical_table(by_alpha);

        ExperimentConfig by_n = by_alpha;
        by_n.alphas = {2.0};
        by_n.sizes = {50, 200, 1000};
        const auto n_rows = run_empirical_table(by_n);
        const double secs = seconds_since(t0);

        for (const auto &r : a_rows)
        {
            c.note(fmt("n=%zu alpha=%g: mean %.4f (stderr %.4f)", r.n, r.alpha, r.mean, r.std_error));
        }
        for (const auto &r : n_rows)
        {
            c.note(fmt("n=%zu alpha=%g: mean %.4f (stderr %.4f)", r.n, r.alpha, r.mean, r.std_error));
        }
        c.note(fmt("%.0f s total", secs));

        const double mid = a_rows[1].mean;
        c.expect(mid >= 0.4433 && mid <= 0.6130, fmt("n=500 alpha=2 mean %.4f outside [0.4433, 0.6130]", mid));
        c.expect(mid <= 0.56, fmt("n=500 alpha=2 mean %.4f above 0.56", mid));
        for (std::size_t i = 1; i < a_rows.size(); i++)
        {
            c.expect(a_rows[i].mean <= a_rows[i - 1].mean,
                     fmt("mean rises from alpha=%g to alpha=%g", a_rows[i - 1].alpha, a_rows[i].alpha));
        }
        for (std::size_t i = 1; i < n_rows.size(); i++)
        {
            c.expect(n_rows[i].mean < n_rows[i - 1].mean,
                     fmt("mean does not decrease from n=%zu to n=%zu", n_rows[i - 1].n, n_rows[i].n));
        }
        c.expect(secs < 600.0, fmt("%.0f s exceeds 10 min", secs));
    }

    void criterion10(Checker &c)
    {
        // result payloads for a run of each experiment kind, as JSON and CSV text
        auto payloads = [](std::size_t workers) {
            ExperimentConfig up;
            up.alphas = {1.0, 2.5};
            up.samples = 150'000; // more than two sampling chunks
            up.seed = 31;
            up.workers = workers;

            ExperimentConfig emp;
            emp.alphas = {1.0, 2.0};
            emp.sizes = {8, 40};
            emp.instances_per_cell = 4;
            emp.seed = 32;
            emp.workers = workers;

            ExperimentConfig low;
            low.workers = workers;

            const auto u = run_upper_table(up);
            const auto e = run_empirical_table(emp);
            const auto l = run_lower_table(low, {0.6277, 0.71, 0.7833});
            const auto nn = sample_nn_distances(NormKind::l1, 4.0, 20'000, 33, workers);
            std::ostringstream nn_text;
            nn_text.precision(17);
            nn_text << nn.nearest_mean << ' ' << nn.nearest_stderr << ' ' << nn.second_mean << ' '
                    << nn.second_stderr << ' ' << nn.redraws;
            return std::vector<std::string>{to_json(u).dump(), to_csv(u), to_json(e).dump(), to_csv(e),
                                            to_json(l).dump(), to_csv(l), nn_text.str()};
        };
        const char *names[] = {"upper json", "upper csv", "empirical json", "empirical csv",
                               "lower json",  "lower csv", "nn sample"};
        const auto base = payloads(1);
        for (std::size_t workers : {std::size_t{1}, std::size_t{2}, std::size_t{4}})
        {
            const auto other = payloads(workers);
            for (std::size_t i = 0; i < base.size(); i++)
            {
                c.expect(other[i] == base[i], fmt("%s differs with %zu workers", names[i], workers));
            }
        }
        c.note("compared 3 reruns at 1, 2 and 4 workers");
    }

    struct Criterion
    {
        int id;
        const char *title;
        void (*run)(Checker &);
    };
}

// Optional arguments select criteria by number; no arguments runs all of them.
int main(int argc, char **argv)
{
    const Criterion criteria[] = {
        {1, "straight-pattern upper bound", criterion1},
        {2, "triangle-pattern upper bounds", criterion2},
        {3, "quartet-pattern upper bounds", criterion3},
        {4, "five-point upper bounds", criterion4},
        {5, "lower-bound closed forms", criterion5},
        {6, "nearest-neighbour laws", criterion6},
        {7, "oracle equivalence", criterion7},
        {8, "structural properties", criterion8},
        {9, "empirical bracket", criterion9},
        {10, "determinism", criterion10},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; i++)
    {
        selected.push_back(std::atoi(argv[i]));
    }

    int failed = 0, ran = 0;
    for (const auto &cr : criteria)
    {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), cr.id) == selected.end())
        {
            continue;
        }
        ran++;
        Checker c;
        const auto t0 = Clock::now();
        try
        {
            cr.run(c);
        }
        catch (const std::exception &e)
        {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("%s %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title, seconds_since(t0));
        for (const auto &n : c.notes)
        {
            std::printf("    %s\n", n.c_str());
        }
        for (std::size_t i = 0; i < c.failures.size() && i < 10; i++)
        {
            std::printf("    failure: %s\n", c.failures[i].c_str());
        }
        if (c.failures.size() > 10)
        {
            std::printf("    ... %zu failures in total\n", c.failures.size());
        }
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria failed\n", failed, ran);
    return failed == 0 ? 0 : 1;
}
