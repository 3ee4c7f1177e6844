#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "tspd/errors.hpp"
#include "tspd/experiment.hpp"
#include "tspd/lower_bound.hpp"

using namespace tspd;

namespace
{
    std::string first_line(const std::string &text)
    {
        return text.substr(0, text.find('\n'));
    }

    std::size_t line_count(const std::string &text)
    {
        return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    }

    ExperimentConfig small_upper()
    {
        ExperimentConfig cfg;
        cfg.alphas = {1.0, 2.0};
        cfg.samples = 20'000;
        cfg.seed = 5;
        cfg.patterns = {PatternKind::straight, PatternKind::five};
        return cfg;
    }

    ExperimentConfig small_empirical()
    {
        ExperimentConfig cfg;
        cfg.alphas = {1.0, 3.0};
        cfg.sizes = {10, 25};
        cfg.instances_per_cell = 3;
        cfg.seed = 11;
        return cfg;
    }
}

TEST_CASE("config validation")
{
    ExperimentConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.alphas = {2.0, 0.5};
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    cfg = {};
    cfg.alphas.clear();
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    cfg = {};
    cfg.sizes = {1};
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    cfg = {};
    cfg.instances_per_cell = 0;
    CHECK_THROWS_AS(validate(cfg), ParameterError);

    const auto echo = to_json(ExperimentConfig{});
    CHECK(echo.at("samples") == 2'000'000);
    CHECK(echo.at("instances_per_cell") == 30);
    CHECK(echo.at("metric") == "euclidean");
    CHECK_FALSE(echo.contains("workers"));
}

TEST_CASE("lower-bound table")
{
    ExperimentConfig cfg;
    const auto rows = run_lower_table(cfg, {0.71, 0.6277});
    REQUIRE(rows.size() == 10);
    const double expected[] = {0.5670, 0.5217, 0.4858, 0.4564, 0.4317};
    for (int i = 0; i < 5; i++)
    {
        CHECK(rows[i].beta == 0.71);
        CHECK(rows[i].bound == doctest::Approx(expected[i]).epsilon(1e-12));
    }
    CHECK(rows[7].alpha == 2.0);
    CHECK(rows[7].bound == doctest::Approx(0.4433).epsilon(1e-12));
    CHECK(rows[7].ratio_bound == doctest::Approx(0.2092).epsilon(1e-12));

    cfg.alphas = {2.0};
    const auto mixed = run_lower_table(cfg, {0.90});
    CHECK(mixed[0].bound == doctest::Approx(0.5761).epsilon(1e-12));

    const auto csv = to_csv(rows);
    CHECK(first_line(csv) == "beta,alpha,rho_star,bound,ratio");
    CHECK(line_count(csv) == 11);
    CHECK(csv.find("\n0.71,2,0.468165,0.4858,0.2366\n") != std::string::npos);
    CHECK_THROWS_AS((void)run_lower_table(cfg, {}), ParameterError);
    CHECK_THROWS_AS((void)run_lower_table(cfg, {-1.0}), ParameterError);
}

TEST_CASE("upper-bound table is reproducible")
{
    auto cfg = small_upper();
    cfg.workers = 1;
    const auto a = run_upper_table(cfg);
    cfg.workers = 3;
    const auto b = run_upper_table(cfg);
    REQUIRE(a.size() == 4);
    CHECK(a[0].pattern == PatternKind::straight);
    CHECK(a[3].pattern == PatternKind::five);
    CHECK(a[3].alpha == 2.0);
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_json(a) == to_json(b));
    CHECK(first_line(to_csv(a)) == "pattern,alpha,h,bound,stderr");
    CHECK(a[0].bound() == round4(a[0].mean));

    // the straight bound does not depend on alpha and the blocks are shared
    CHECK(a[0].mean == a[1].mean);

    cfg.metric = TruckNorm::rectilinear;
    CHECK_THROWS_AS((void)run_upper_table(cfg), UnsupportedFeature);
}

TEST_CASE("empirical table is reproducible across worker counts")
{
    auto cfg = small_empirical();
    cfg.workers = 1;
    const auto a = run_empirical_table(cfg);
    cfg.workers = 2;
    const auto b = run_empirical_table(cfg);
    REQUIRE(a.size() == 4);
    CHECK(a[0].n == 10);
    CHECK(a[1].alpha == 3.0);
    CHECK(a[2].n == 25);
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_json(a) == to_json(b));
    CHECK(first_line(to_csv(a)) == "n,alpha,instances,mean,stderr");
    for (const auto &r : a)
    {
        CHECK(r.instances == 3);
        CHECK(r.mean > 0.0);
        CHECK(r.std_error >= 0.0);
    }
    // same point sets for both alphas, and a faster drone cannot hurt
    CHECK(a[1].mean <= a[0].mean);

    const auto t = timings(a);
    CHECK(t.contains("n=25,alpha=3"));
    CHECK(to_json(a)[0].contains("elapsed") == false);
}

TEST_CASE("reports round-trip and differ only in wall clock")
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto path1 = (dir / "tspd_test_report1.json").string();
    const auto path2 = (dir / "tspd_test_report2.json").string();

    const auto cfg = small_upper();
    RunMetadata meta;
    meta.seed = cfg.seed;
    meta.config = to_json(cfg);

    meta.wall_clock = 1.5;
    const auto r1 = make_report(meta, to_json(run_upper_table(cfg)));
    meta.wall_clock = 2.5;
    const auto r2 = make_report(meta, to_json(run_upper_table(cfg)));
    report_run(path1, r1);
    report_run(path2, r2);

    std::ifstream in(path1);
    const auto back = nlohmann::json::parse(in);
    CHECK(back == r1);
    CHECK(back.at("metadata").at("generator") == std::string(kGeneratorId));
    CHECK(back.at("metadata").at("tool_version") == std::string(kToolVersion));
    CHECK(back.at("metadata").at("seed") == 5);
    CHECK(back.at("metadata").at("config") == to_json(cfg));

    auto strip = [](nlohmann::json j) {
        j["metadata"].erase("wall_clock");
        return j;
    };
    CHECK(strip(r1) == strip(r2));
    CHECK(r1 != r2);
    CHECK(r1.at("result").dump() == r2.at("result").dump());

    std::filesystem::remove(path1);
    std::filesystem::remove(path2);

    try
    {
        report_run("/nonexistent_dir/report.json", r1);
        FAIL("expected IoError");
    }
    catch (const IoError &e)
    {
        CHECK(e.path() == "/nonexistent_dir/report.json");
    }
    CHECK_THROWS_AS(write_text("/nonexistent_dir/t.csv", "x"), IoError);
}

TEST_CASE("solve report JSON")
{
    const auto inst = generate_instance(6, 3);
    const MetricPair m(TruckNorm::rectilinear, 2.0);
    const auto rep = tspd_exact(inst, m);
    const auto j = to_json(rep, m);
    CHECK(j.at("n") == 6);
    CHECK(j.at("alpha") == 2.0);
    CHECK(j.at("truck_norm") == "rectilinear");
    CHECK(j.at("method") == "exact");
    CHECK(j.at("seed").is_null());
    CHECK(j.at("makespan") == rep.makespan);
    REQUIRE(j.at("rings").size() == rep.solution.rings.size());

    TspdSolution back;
    back.instance_n = j.at("n");
    for (const auto &r : j.at("rings"))
    {
        Ring ring;
        ring.start = r.at("start");
        ring.end = r.at("end");
        ring.truck = r.at("truck").get<std::vector<std::size_t>>();
        if (!r.at("drone").is_null())
        {
            ring.drone = r.at("drone").get<std::size_t>();
        }
        back.rings.push_back(ring);
    }
    CHECK(makespan(back, inst, m) == doctest::Approx(rep.makespan).epsilon(1e-12));
}

TEST_CASE("number formatting round-trips")
{
    for (double x : {0.1, 1.0 / 3.0, 2.0, 1e-17, 123456.789})
    {
        CHECK(std::stod(format_number(x)) == x);
    }
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(1.5) == "1.5");
}
