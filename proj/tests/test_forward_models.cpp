#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "setinv/forward_models.hpp"

using namespace setinv;

namespace {

const LVParams kOscillating{1.0, 0.02, 1.5, 0.02};

} // namespace

TEST_CASE("forward evaluation of the algebraic models")
{
    CHECK(eval_forward(builtin_problem("circle"), Point{0, 0})[0] == 0.0);
    CHECK(eval_forward(builtin_problem("doughnut"), Point{1, 1})[0] == 3.0);
    CHECK(eval_forward(builtin_problem("sphere-5d"), Point{1, 2, 0, 0, 1})[0] == 6.0);
    // Points outside the state space are still evaluated.
    CHECK(eval_forward(builtin_problem("circle"), Point{10, 0})[0] == 100.0);
    CHECK_THROWS_AS(eval_forward(builtin_problem("circle"), Point{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("natural inclusion functions")
{
    CHECK(eval_inclusion(builtin_problem("circle"), Box{Interval(1, 2), Interval(0, 1)}) == Box{Interval(1, 5)});
    CHECK(eval_inclusion(builtin_problem("circle"), Box{Interval(1, 1), Interval(1, 1)}) == Box{Interval(2, 2)});
    const Box s = eval_inclusion(builtin_problem("sphere-3d"), Box::cube(3, 0.0, 0.1));
    CHECK(s[0].lo() == 0.0);
    CHECK(s[0].hi() == doctest::Approx(0.03).epsilon(1e-14));
    CHECK_THROWS_AS(eval_inclusion(builtin_problem("lotka-volterra"), Box::cube(2, 0.01, 0.02)),
                    UnsupportedModelError);
}

TEST_CASE("inclusion contains point images on random boxes")
{
    std::mt19937_64 rng(5);
    for (const char *name : {"circle", "doughnut", "sphere-3d", "sphere-6d"}) {
        const ProblemSpec spec = builtin_problem(name);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<Interval> dims;
            for (std::size_t i = 0; i < spec.input_dim(); ++i) {
                const double a = u(rng);
                const double b = u(rng);
                dims.emplace_back(std::min(a, b), std::max(a, b));
            }
            const Box b(dims);
            const Box image = eval_inclusion(spec, b);
            Point x(spec.input_dim());
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = std::uniform_real_distribution<double>(b[i].lo(), b[i].hi())(rng);
            }
            REQUIRE(image.contains(eval_forward(spec, x)));
        }
    }
}

TEST_CASE("membership oracle")
{
    CHECK(membership(builtin_problem("circle"), Point{0, 0}) == Label::positive);
    CHECK(membership(builtin_problem("ring"), Point{0, 0}) == Label::negative);
    // Closed target: F = 1 on the lower boundary of [1, 2].
    CHECK(membership(builtin_problem("doughnut"), Point{1, 0}) == Label::positive);
    CHECK(membership(builtin_problem("ring"), Point{1, 1}) == Label::positive);
    CHECK(membership(builtin_problem("ring"), Point{1.5, 1}) == Label::negative);
}

TEST_CASE("membership agrees with componentwise target test")
{
    std::mt19937_64 rng(9);
    const ProblemSpec spec = builtin_problem("doughnut");
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 2000; ++k) {
        const Point x{u(rng), u(rng)};
        const double f = eval_forward(spec, x)[0];
        const bool inside = spec.target[0].lo() <= f && f <= spec.target[0].hi();
        CHECK((membership(spec, x) == Label::positive) == inside);
    }
}

TEST_CASE("problem spec invariants")
{
    CHECK_THROWS_AS(ProblemSpec("bad", SphereKD{0}, Box{Interval(0, 1)}, Box{Interval(0, 1)}), ConfigError);
    CHECK_THROWS_AS(ProblemSpec("bad", Circle{}, Box{Interval(0, 1)}, Box::cube(3, 0, 1)), ConfigError);
    CHECK_THROWS_AS(ProblemSpec("bad", Circle{}, Box{Interval(0, 1)}, Box{Interval(0, 1), Interval(2, 2)}),
                    ConfigError);
    LotkaVolterraMinPrey lv;
    lv.u0 = 0.0;
    CHECK_THROWS_AS(ProblemSpec("bad", lv, Box{Interval(10, 1e6)}, Box::cube(2, 0.01, 0.1)), ConfigError);
    CHECK_THROWS_AS(builtin_problem("sphere-9d"), ConfigError);
}

TEST_CASE("built-in problem table")
{
    CHECK(builtin_problem_names().size() == 10);
    const auto s4 = builtin_problem("sphere-4d");
    CHECK(s4.state_space == Box::cube(4, -1, 1));
    CHECK(s4.target == Box{Interval(0, 0.25)});
    const auto s3 = builtin_problem("sphere-3d");
    CHECK(s3.state_space == Box::cube(3, -1.5, 1.5));
    CHECK(s3.target == Box{Interval(0, 0.5)});
    const auto s7 = builtin_problem("sphere-7d");
    CHECK(s7.state_space == Box::cube(7, -0.75, 0.75));
    const auto lv = builtin_problem("lotka-volterra");
    CHECK(lv.state_space == Box::cube(2, 0.01, 0.1));
    const auto &m = std::get<LotkaVolterraMinPrey>(lv.forward);
    CHECK(m.p1 == 1.0);
    CHECK(m.p3 == 1.0);
    CHECK(m.u0 == 50.0);
    CHECK(m.v0 == 50.0);
    CHECK(m.horizon == 20.0);
}

TEST_CASE("problem config round trip")
{
    for (const auto &name : builtin_problem_names()) {
        const ProblemSpec spec = builtin_problem(name);
        const ProblemSpec back = problem_from_json(problem_to_json(spec));
        CHECK(back.name == spec.name);
        CHECK(back.target == spec.target);
        CHECK(back.state_space == spec.state_space);
        CHECK(model_name(back.forward) == model_name(spec.forward));
    }
    const auto inline_spec = problem_from_json(nlohmann::json::parse(
        R"({"model": "sphere", "params": {"k": 2}, "target": [[0, 1]], "state_space": [[-2, 2], [-2, 2]]})"));
    CHECK(inline_spec.input_dim() == 2);
    CHECK(membership(inline_spec, Point{0.5, 0.5}) == Label::positive);
    const auto override_spec = problem_from_json(nlohmann::json::parse(R"({"name": "ring", "target": [[0, 3]]})"));
    CHECK(override_spec.target == Box{Interval(0, 3)});
    CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse(R"({"model": "teapot"})")), ConfigError);
    CHECK_THROWS_AS(problem_from_json("nowhere"), ConfigError);
}

TEST_CASE("lotka-volterra equilibrium is stationary")
{
    // (u*, v*) = (p3/p4, p1/p2) = (75, 50)
    const LVTrajectory t = integrate_lv(kOscillating, 75.0, 50.0, 20.0, 1e-2);
    CHECK(t.min_prey == doctest::Approx(75.0).epsilon(1e-12));
    for (double v : t.v) {
        REQUIRE(v == doctest::Approx(50.0).epsilon(1e-12));
    }
    CHECK(t.t.size() == 2001);
    CHECK(t.t.back() == 20.0);
}

TEST_CASE("lotka-volterra without predation grows monotonically")
{
    const LVParams p{1.0, 0.0, 1.0, 0.02};
    const LVTrajectory t = integrate_lv(p, 50.0, 50.0, 2.0, 1e-2);
    CHECK(t.min_prey == 50.0);
    CHECK(t.u.back() == doctest::Approx(50.0 * std::exp(2.0)).epsilon(1e-8));
}

TEST_CASE("reference parameters give an oscillating trajectory")
{
    const LVTrajectory t = integrate_lv(kOscillating, 50.0, 50.0, 20.0, 1e-2);
    int turns = 0;
    for (std::size_t i = 1; i + 1 < t.u.size(); ++i) {
        turns += (t.u[i] < t.u[i - 1]) != (t.u[i + 1] < t.u[i]);
    }
    CHECK(turns >= 4);
    // v0 = p1 / p2 puts the start on the orbit's leftmost point.
    CHECK(t.min_prey == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("rk4 convergence is fourth order")
{
    // Interior prey minimum, unlike kOscillating whose minimum is the initial state.
    const LVParams p{1.0, 0.05, 1.0, 0.02};
    const double reference = integrate_lv(p, 50.0, 50.0, 20.0, 1e-4, false).min_prey_interpolated;
    const double dts[] = {0.04, 0.02, 0.01};
    double errors[3];
    for (int k = 0; k < 3; ++k) {
        errors[k] = std::abs(integrate_lv(p, 50.0, 50.0, 20.0, dts[k], false).min_prey_interpolated - reference);
    }
    for (int k = 0; k + 1 < 3; ++k) {
        const double ratio = errors[k] / errors[k + 1];
        MESSAGE("dt " << dts[k] << " -> " << dts[k + 1] << ": error ratio " << ratio);
        CHECK(ratio >= 8.0);
        CHECK(ratio <= 32.0);
    }
}

TEST_CASE("first integral drift at dt = 1e-3")
{
    const LVTrajectory t = integrate_lv(kOscillating, 50.0, 50.0, 20.0, 1e-3);
    const double h0 = lv_first_integral(kOscillating, t.u.front(), t.v.front());
    double worst = 0.0;
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        worst = std::max(worst, std::abs(lv_first_integral(kOscillating, t.u[i], t.v[i]) - h0) / std::abs(h0));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("lotka-volterra integration errors")
{
    CHECK_THROWS_AS(integrate_lv(kOscillating, 50, 50, 20, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_lv(kOscillating, 50, 50, 0.001, 0.01), std::invalid_argument);
    // Prey explodes without predators: u' = 100 u, overflows before t = 10.
    const LVParams runaway{100.0, 0.0, 1.0, 0.0};
    try {
        integrate_lv(runaway, 50, 50, 10.0, 0.01, false);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError &e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 10.0);
    }
}

TEST_CASE("lotka-volterra inversion forward model")
{
    const ProblemSpec spec = builtin_problem("lotka-volterra");
    const double f = eval_forward(spec, Point{0.02, 0.02})[0];
    const LVParams p{1.0, 0.02, 1.0, 0.02};
    CHECK(f == integrate_lv(p, 50, 50, 20, 1e-2, false).min_prey);
}
