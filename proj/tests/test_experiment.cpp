#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorenzband/band.hpp"
#include "lorenzband/design.hpp"
#include "lorenzband/errors.hpp"
#include "lorenzband/experiment.hpp"
#include "lorenzband/lorenz.hpp"
#include "lorenzband/population.hpp"
#include "lorenzband/rng.hpp"

using namespace lorenzband;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path;
}

std::string error_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

ExperimentSpec smoke_spec() {
    ExperimentSpec spec;
    spec.population.synthetic = GeneratorSpec::lognormal(0.0, 1.0, 300);
    spec.population.synthetic_seed = 5;
    spec.sample_sizes = {10};
    spec.replications = 20;
    spec.trim = 0.025;
    spec.seed = 11;
    return spec;
}

}  // namespace

TEST_CASE("trim keeps the central part of the curve") {
    const auto pop = Population::from_incomes({1, 3});
    const auto curve = population_lorenz(pop);

    SUBCASE("zero trim is the identity") {
        const auto same = trim_curve(curve, 0.0);
        REQUIRE(same.points.size() == curve.points.size());
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            CHECK(same.points[i].p == curve.points[i].p);
            CHECK(same.points[i].q == curve.points[i].q);
        }
    }

    SUBCASE("interior vertices survive, boundaries are interpolated") {
        const auto trimmed = trim_curve(curve, 0.2);
        REQUIRE(trimmed.points.size() == 3);
        CHECK(trimmed.points[0].p == doctest::Approx(0.2));
        CHECK(trimmed.points[0].q == doctest::Approx(0.1));
        CHECK(trimmed.points[1].p == doctest::Approx(0.5));
        CHECK(trimmed.points[1].q == doctest::Approx(0.25));
        CHECK(trimmed.points[2].p == doctest::Approx(0.8));
        CHECK(trimmed.points[2].q == doctest::Approx(0.7));
    }

    SUBCASE("diagonal stays diagonal") {
        PiecewiseCurve diag;
        diag.points = {{0.0, 0.0}, {1.0, 1.0}};
        const auto trimmed = trim_curve(diag, 0.4);
        REQUIRE(trimmed.points.size() == 2);
        CHECK(trimmed.points[0].p == doctest::Approx(0.4));
        CHECK(trimmed.points[0].q == doctest::Approx(0.4));
        CHECK(trimmed.points[1].p == doctest::Approx(0.6));
        CHECK(trimmed.points[1].q == doctest::Approx(0.6));
    }

    SUBCASE("domain guards") {
        CHECK_THROWS_AS((void)trim_curve(curve, -0.1), Error);
        CHECK_THROWS_AS((void)trim_curve(curve, 0.5), Error);
    }
}

TEST_CASE("coverage check walks the whole target") {
    Rng rng(3);
    std::vector<double> y(120);
    for (double& v : y) v = std::exp(rng.normal());
    const auto pop = Population::from_incomes(std::move(y));
    const auto s = draw_srswor(pop, 10, 8);
    const auto est = estimate_points(s);
    const auto path = make_sigma_path(s, est);
    const auto band = make_band(est, path, BandKind::pcb, 0.05, pcb_critical(0.05));

    PiecewiseCurve on_curve;
    for (int k = 1; k <= s.n - 1; ++k)
        on_curve.points.push_back(est.points[static_cast<std::size_t>(k) - 1]);
    CHECK(curve_covered(band, on_curve, 500));

    PiecewiseCurve shifted = on_curve;
    for (auto& v : shifted.points) v.q += 0.5;
    CHECK_FALSE(curve_covered(band, shifted, 500));

    PiecewiseCurve empty;
    CHECK_THROWS_AS((void)curve_covered(band, empty, 500), Error);
}

TEST_CASE("census samples cover the population curve") {
    ExperimentSpec spec;
    spec.population.synthetic = GeneratorSpec::lognormal(0.0, 1.0, 6);
    spec.population.synthetic_seed = 2;
    spec.sample_sizes = {6};
    spec.replications = 3;
    spec.trim = 0.2;
    spec.seed = 9;
    const auto report = run_experiment(spec);
    REQUIRE(report.cells.size() == 1);
    CHECK(report.cells[0].n == 6);
    CHECK(report.cells[0].pcb_rate == 1.0);
    CHECK(report.cells[0].scb_rate == 1.0);
    CHECK(report.cells[0].pcb_se == 0.0);
    CHECK(report.cells[0].scb_se == 0.0);
}

TEST_CASE("coverage experiment smoke run") {
    const auto spec = smoke_spec();
    const auto report = run_experiment(spec);
    REQUIRE(report.cells.size() == 1);
    const CoverageCell& cell = report.cells[0];
    REQUIRE(cell.pcb_hits.size() == 20);
    REQUIRE(cell.scb_hits.size() == 20);
    REQUIRE(cell.u_values.size() == 20);

    SUBCASE("simultaneous band never loses to the pointwise band") {
        for (std::size_t r = 0; r < cell.pcb_hits.size(); ++r) {
            if (cell.pcb_hits[r]) CHECK(cell.scb_hits[r]);
        }
        CHECK(cell.scb_rate >= cell.pcb_rate);
    }

    SUBCASE("rates come with binomial standard errors") {
        CHECK(cell.pcb_se ==
              doctest::Approx(std::sqrt(cell.pcb_rate * (1.0 - cell.pcb_rate) / 20.0)));
        CHECK(cell.scb_se ==
              doctest::Approx(std::sqrt(cell.scb_rate * (1.0 - cell.scb_rate) / 20.0)));
        CHECK(cell.scb_rate > 0.5);
    }

    SUBCASE("adjusted critical values sit above the pointwise one") {
        CHECK(cell.mean_c > 0.0);
        CHECK(cell.mean_u > pcb_critical(spec.alpha));
        for (double u : cell.u_values) CHECK(u > pcb_critical(spec.alpha));
    }

    SUBCASE("deterministic for a fixed seed") {
        const auto again = run_experiment(spec);
        REQUIRE(again.cells.size() == 1);
        CHECK(again.cells[0].pcb_rate == cell.pcb_rate);
        CHECK(again.cells[0].scb_rate == cell.scb_rate);
        for (std::size_t r = 0; r < cell.u_values.size(); ++r)
            CHECK(again.cells[0].u_values[r] == cell.u_values[r]);
    }

    SUBCASE("worker count does not change the results") {
        auto threaded = spec;
        threaded.threads = 3;
        const auto again = run_experiment(threaded);
        CHECK(again.cells[0].pcb_rate == cell.pcb_rate);
        CHECK(again.cells[0].scb_rate == cell.scb_rate);
        for (std::size_t r = 0; r < cell.u_values.size(); ++r)
            CHECK(again.cells[0].u_values[r] == cell.u_values[r]);
    }
}

TEST_CASE("experiment argument guards") {
    auto spec = smoke_spec();
    spec.replications = 0;
    CHECK_THROWS_AS((void)run_experiment(spec), Error);

    spec = smoke_spec();
    spec.sample_sizes.clear();
    CHECK_THROWS_AS((void)run_experiment(spec), Error);

    spec = smoke_spec();
    spec.sample_sizes = {2};
    CHECK_THROWS_AS((void)run_experiment(spec), Error);

    spec = smoke_spec();
    spec.sample_sizes = {301};
    CHECK_THROWS_AS((void)run_experiment(spec), Error);

    spec = smoke_spec();
    spec.alpha = 1.0;
    CHECK_THROWS_AS((void)run_experiment(spec), Error);
}

TEST_CASE("experiment config parsing") {
    SUBCASE("full generator config") {
        const std::string path = write_temp("lbtest_exp_valid.json", R"({
            "population": {"generator": {"kind": "lognormal", "mu": 0.5, "sigma": 1.2, "N": 50}, "seed": 7},
            "sample_sizes": [5, 10],
            "replications": 3,
            "alpha": 0.1,
            "trim": 0.05,
            "seed": 42,
            "t_grid": 8,
            "c_grid": 4,
            "c_draws": 150,
            "check_points_per_segment": 2,
            "check_cap": 100,
            "threads": 2
        })");
        const auto spec = load_experiment_spec(path);
        REQUIRE(spec.population.synthetic.has_value());
        CHECK(spec.population.synthetic->kind == GeneratorSpec::Kind::lognormal);
        CHECK(spec.population.synthetic->mu == 0.5);
        CHECK(spec.population.synthetic->sigma == 1.2);
        CHECK(spec.population.synthetic->n == 50);
        CHECK(spec.population.synthetic_seed == 7);
        CHECK(spec.sample_sizes == std::vector<int>{5, 10});
        CHECK(spec.replications == 3);
        CHECK(spec.alpha == 0.1);
        CHECK(spec.trim == 0.05);
        CHECK(spec.seed == 42);
        CHECK(spec.t_grid == 8);
        CHECK(spec.c_grid == 4);
        CHECK(spec.c_draws == 150);
        CHECK(spec.check_points_per_segment == 2);
        CHECK(spec.check_cap == 100);
        CHECK(spec.threads == 2);
        std::remove(path.c_str());
    }

    SUBCASE("two-class generator and csv sources") {
        const std::string gen = write_temp("lbtest_exp_two_class.json", R"({
            "population": {"generator": {"kind": "two_class", "fraction": 0.3, "share": 0.1, "N": 10}},
            "sample_sizes": [4]
        })");
        const auto spec = load_experiment_spec(gen);
        REQUIRE(spec.population.synthetic.has_value());
        CHECK(spec.population.synthetic->kind == GeneratorSpec::Kind::two_class);
        CHECK(spec.population.synthetic->fraction == 0.3);
        CHECK(spec.population.synthetic->share == 0.1);
        std::remove(gen.c_str());

        const std::string csv = write_temp("lbtest_exp_csv.json", R"({
            "population": {"csv": "data/pop.csv", "column": "wage"},
            "sample_sizes": [4]
        })");
        const auto from_csv = load_experiment_spec(csv);
        CHECK_FALSE(from_csv.population.synthetic.has_value());
        CHECK(from_csv.population.csv_path == "data/pop.csv");
        CHECK(from_csv.population.csv_column == "wage");
        std::remove(csv.c_str());
    }

    SUBCASE("every schema violation is listed") {
        const std::string path = write_temp("lbtest_exp_invalid.json", R"({
            "population": {"generator": {"kind": "weird", "N": 1}},
            "trim": 0.6,
            "foo": 1
        })");
        const std::string msg = error_message([&] { (void)load_experiment_spec(path); });
        CHECK(msg.find("schema violations") != std::string::npos);
        CHECK(msg.find("kind") != std::string::npos);
        CHECK(msg.find("N: must be an integer >= 2") != std::string::npos);
        CHECK(msg.find("trim") != std::string::npos);
        CHECK(msg.find("sample_sizes: required") != std::string::npos);
        CHECK(msg.find("foo: unknown key") != std::string::npos);
        std::remove(path.c_str());
    }

    SUBCASE("missing or malformed files") {
        try {
            (void)load_experiment_spec("/nonexistent/config.json");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::missing_file);
        }
        const std::string path = write_temp("lbtest_exp_badjson.json", "{ nope");
        try {
            (void)load_experiment_spec(path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::bad_argument);
            CHECK(std::string(e.what()).find("not valid JSON") != std::string::npos);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("report rendering") {
    CoverageReport report;
    report.alpha = 0.05;
    report.trim = 0.025;
    report.replications = 200;
    report.seed = 4;
    CoverageCell a;
    a.n = 10;
    a.pcb_rate = 0.815;
    a.scb_rate = 0.96;
    a.pcb_se = 0.027;
    a.scb_se = 0.014;
    a.mean_u = 9.125;
    a.mean_c = 2.5;
    CoverageCell b = a;
    b.n = 100;
    b.pcb_rate = 0.78;
    b.scb_rate = 0.95;
    b.mean_u = 10.875;
    report.cells = {a, b};

    SUBCASE("csv table") {
        const std::string csv = report_to_csv(report);
        CHECK(csv == "band,n=10,n=100\npcb,0.815,0.780\nscb,0.960,0.950\n");
    }

    SUBCASE("text table") {
        const std::string text = report_to_text(report);
        CHECK(text.find("alpha=0.05") != std::string::npos);
        CHECK(text.find("R=200") != std::string::npos);
        CHECK(text.find("n=10") != std::string::npos);
        CHECK(text.find("n=100") != std::string::npos);
        CHECK(text.find("0.815") != std::string::npos);
        CHECK(text.find("mean u") != std::string::npos);
        CHECK(text.find("9.125") != std::string::npos);
    }

    SUBCASE("json round trip") {
        const auto doc = nlohmann::json::parse(report_to_json(report));
        CHECK(doc["alpha"] == 0.05);
        CHECK(doc["replications"] == 200);
        CHECK(doc["seed"] == 4);
        REQUIRE(doc["cells"].size() == 2);
        CHECK(doc["cells"][0]["n"] == 10);
        CHECK(doc["cells"][0]["pcb_rate"] == 0.815);
        CHECK(doc["cells"][1]["mean_u"] == 10.875);
        CHECK(doc["cells"][1]["mean_C"] == 2.5);
    }
}
