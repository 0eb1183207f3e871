#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "setinv/bench.hpp"

using namespace setinv;

TEST_CASE("grid coordinates and index order")
{
    const Grid g(Box{{-1.0, 1.0}, {0.0, 4.0}}, 5);
    CHECK(g.size() == 25);
    CHECK(g.coordinate(0, 0) == -1.0);
    CHECK(g.coordinate(0, 4) == 1.0);
    CHECK(g.coordinate(1, 1) == 1.0);
    // Last dimension fastest.
    CHECK(g.point(1) == Point{-1.0, 1.0});
    CHECK(g.point(5) == Point{-0.5, 0.0});
    CHECK(g.point(24) == Point{1.0, 4.0});
    const auto all = g.points();
    REQUIRE(all.size() == 25);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i] == g.point(i));
    }
}

TEST_CASE("grid errors")
{
    CHECK_THROWS_AS(Grid(Box::cube(2, 0.0, 1.0), 1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(Box::cube(8, 0.0, 1.0), 100, 1'000'000), ResourceError);
    CHECK_NOTHROW(Grid(Box::cube(8, 0.0, 1.0), 9));
}

TEST_CASE("constant classifier on the circle")
{
    // Negative everywhere scores the outside area fraction, 1 - 2 pi / 36.
    const ProblemSpec spec = builtin_problem("circle");
    const Grid g(spec.state_space, 601);
    const AccuracyResult r =
        evaluate_accuracy([](std::span<const double>) { return Label::negative; }, spec, g, 100);
    CHECK(r.points == 601u * 601u);
    CHECK(r.accuracy == doctest::Approx(1.0 - 2.0 * M_PI / 36.0).epsilon(2e-3));
}

TEST_CASE("oracle cache")
{
    const ProblemSpec spec = builtin_problem("ring");
    const Grid g(spec.state_space, 41);
    OracleGridCache cache;
    const auto &a = cache.labels(spec, g);
    CHECK(&a == &cache.labels(spec, g));
    CHECK(a == oracle_labels(spec, g));
    CHECK(cache.verify(spec, g, 200, 3) == 0);
}

TEST_CASE("factorized grid prediction matches pointwise prediction")
{
    std::mt19937_64 rng(4);
    for (std::size_t dim : {2u, 3u, 5u}) {
        CAPTURE(dim);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<Point> sv;
        std::vector<Label> y;
        std::vector<double> beta;
        for (int k = 0; k < 12; ++k) {
            Point p(dim);
            for (auto &v : p) {
                v = u(rng);
            }
            sv.push_back(std::move(p));
            y.push_back(k % 2 ? Label::positive : Label::negative);
            beta.push_back(0.5 + std::abs(u(rng)));
        }
        const SvmModel m(sv, y, beta, 0.1, 0.4, 1e6);
        const Grid g(Box::cube(dim, -1.0, 1.0), dim == 2 ? 61 : 9);
        const auto fast = predict_grid(m, g);
        REQUIRE(fast.size() == g.size());
        std::size_t mismatch = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Point x = g.point(i);
            if (fast[i] != predict(m, x) && std::abs(decision_value(m, x)) > 1e-9) {
                ++mismatch;
            }
        }
        CHECK(mismatch == 0);
    }
}

TEST_CASE("subpaving grid classification")
{
    const ProblemSpec spec = builtin_problem("circle");
    const Subpaving sp = sivia_invert(spec, 0.1);
    const Grid g(spec.state_space, 101);
    const auto labels = classify_grid(sp, g);
    for (std::size_t i = 0; i < g.size(); i += 37) {
        CHECK(labels[i] == subpaving_classify(sp, g.point(i)));
    }
    const AccuracyResult r = evaluate_accuracy(sp, spec, g, nullptr, 100);
    CHECK(r.accuracy > 0.95);
    CHECK(r.accuracy < 1.0);
}

TEST_CASE("accuracy_of")
{
    const std::vector<Label> a{Label::positive, Label::negative, Label::negative, Label::positive};
    const std::vector<Label> b{Label::positive, Label::positive, Label::negative, Label::negative};
    CHECK(accuracy_of(a, b) == 0.5);
    CHECK(accuracy_of(a, a) == 1.0);
}

TEST_CASE("defaults for built-in problems")
{
    CHECK(default_resolution("circle") == 601);
    CHECK(default_resolution("sphere-3d") == 151);
    CHECK(default_resolution("sphere-8d") == 9);
    CHECK(default_resolution("lotka-volterra") == 301);
    CHECK(default_sample_counts("doughnut") == std::pair<std::size_t, std::size_t>{100, 500});
    CHECK(default_sample_counts("lotka-volterra") == std::pair<std::size_t, std::size_t>{400, 800});
}

TEST_CASE("summary statistics")
{
    BenchReport rep;
    for (double acc : {0.9, 0.8, 1.0}) {
        BenchRow r;
        r.problem = "p";
        r.method = "oasis";
        r.accuracy = acc;
        r.training_seconds = 2.0;
        rep.rows.push_back(r);
    }
    BenchRow bad;
    bad.problem = "p";
    bad.method = "oasis";
    bad.status = RowStatus::run_error;
    rep.rows.push_back(bad);
    const auto s = rep.summary();
    REQUIRE(s.size() == 1);
    CHECK(s[0].runs == 4);
    CHECK(s[0].failures == 1);
    CHECK(s[0].accuracy_mean == doctest::Approx(0.9));
    CHECK(s[0].accuracy_std == doctest::Approx(0.1));
    CHECK(s[0].training_seconds_mean == doctest::Approx(2.0));

    std::stringstream csv;
    write_report_csv(csv, rep);
    const std::string text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(text.find("run-error") != std::string::npos);

    std::stringstream sum;
    write_summary_csv(sum, s);
    const std::string sum_text = sum.str();
    CHECK(std::count(sum_text.begin(), sum_text.end(), '\n') == 2);
}

TEST_CASE("suite config from JSON")
{
    const auto j = nlohmann::json::parse(R"({
        "seeds": [7, 8],
        "box_budget": 1000,
        "problems": ["circle", {"problem": "ring", "methods": ["sivia"], "epsilon": 0.2, "resolution": 51}],
        "oasis": {"n_init": 20}
    })");
    const SuiteConfig c = suite_from_json(j);
    CHECK(c.seeds == std::vector<std::uint64_t>{7, 8});
    CHECK(c.box_budget == 1000);
    CHECK(c.oasis.n_init == 20);
    REQUIRE(c.problems.size() == 2);
    CHECK(c.problems[0].run_oasis);
    CHECK(c.problems[0].run_sivia);
    CHECK_FALSE(c.problems[1].run_oasis);
    CHECK(c.problems[1].epsilon == 0.2);
    CHECK(c.problems[1].resolution == 51u);
    CHECK_THROWS_AS(suite_from_json(nlohmann::json::parse(R"({"seeds": "x"})")), ConfigError);
}

TEST_CASE("small suite with a failing row")
{
    const auto j = nlohmann::json::parse(R"({
        "seeds": [1],
        "box_budget": 50,
        "timing_calls": 50,
        "problems": [{"problem": "circle", "resolution": 61, "n_init": 20, "n_total": 40}]
    })");
    std::size_t progress = 0;
    const BenchReport rep = run_benchmark(suite_from_json(j), [&](const BenchRow &) { ++progress; });
    REQUIRE(rep.rows.size() == 2);
    CHECK(progress == 2);
    for (const auto &r : rep.rows) {
        if (r.method == "oasis") {
            CHECK(r.status == RowStatus::ok);
            CHECK(r.n_samples == 40);
            CHECK(r.accuracy > 0.8);
        } else {
            CHECK(r.status == RowStatus::resource_error);
        }
    }
}
