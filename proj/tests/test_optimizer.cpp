#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "setinv/optimizer.hpp"

using namespace setinv;

namespace {

SvmModel unit_circle()
{
    return SvmModel({Point{0.0, 0.0}}, {Label::positive}, {1.0}, -std::exp(-0.5), 1.0, 1e6);
}

double dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

// Zero-set points of a 2-D model: sign changes along the edges of an n x n
// vertex grid, each refined by bisection along its edge.
std::vector<Point> zero_set_points(const SvmModel &m, const Box &box, std::size_t n)
{
    const double hx = box[0].width() / static_cast<double>(n - 1);
    const double hy = box[1].width() / static_cast<double>(n - 1);
    std::vector<double> v(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            v[j * n + i] = decision_value(m, Point{box[0].lo() + hx * i, box[1].lo() + hy * j});
        }
    }
    auto refine = [&](Point a, Point b, double fa) {
        for (int k = 0; k < 40; ++k) {
            const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
            if ((decision_value(m, mid) > 0.0) == (fa > 0.0)) {
                a = mid;
            } else {
                b = mid;
            }
        }
        return Point{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    };
    std::vector<Point> out;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double f = v[j * n + i];
            const Point p{box[0].lo() + hx * i, box[1].lo() + hy * j};
            if (i + 1 < n && (f > 0.0) != (v[j * n + i + 1] > 0.0)) {
                out.push_back(refine(p, Point{p[0] + hx, p[1]}, f));
            }
            if (j + 1 < n && (f > 0.0) != (v[(j + 1) * n + i] > 0.0)) {
                out.push_back(refine(p, Point{p[0], p[1] + hy}, f));
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("unit circle projection from outside")
{
    const Box omega = Box::cube(2, -3.0, 3.0);
    const ProjectionResult r = nearest_point_on_manifold(unit_circle(), Point{2.0, 0.0}, omega);
    REQUIRE(r.converged);
    CHECK(std::abs(r.point[0] - 1.0) <= 1e-4);
    CHECK(std::abs(r.point[1]) <= 1e-4);
    CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.residual <= 1e-6);
    CHECK_FALSE(r.clamped);
}

TEST_CASE("unit circle projection is radial")
{
    const Box omega = Box::cube(2, -3.0, 3.0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int done = 0;
    for (int k = 0; k < 200; ++k) {
        const Point x0{u(rng), u(rng)};
        const double r0 = std::hypot(x0[0], x0[1]);
        if (r0 < 0.05) {
            continue;
        }
        const ProjectionResult r = nearest_point_on_manifold(unit_circle(), x0, omega);
        REQUIRE(r.converged);
        CHECK(std::abs(r.point[0] - x0[0] / r0) <= 1e-4);
        CHECK(std::abs(r.point[1] - x0[1] / r0) <= 1e-4);
        CHECK(r.distance == doctest::Approx(std::abs(r0 - 1.0)).epsilon(1e-4).scale(1.0));
        ++done;
    }
    CHECK(done > 190);
}

TEST_CASE("point already on the manifold")
{
    const Box omega = Box::cube(2, -3.0, 3.0);
    const Point x0{0.6, 0.8};
    const ProjectionResult r = nearest_point_on_manifold(unit_circle(), x0, omega);
    CHECK(r.converged);
    CHECK(r.distance < 1e-9);
    CHECK(r.iterations == 1);
}

TEST_CASE("higher-dimensional sphere")
{
    const Box omega = Box::cube(5, -2.0, 2.0);
    const SvmModel m({Point(5, 0.0)}, {Label::positive}, {1.0}, -std::exp(-0.5), 1.0, 1e6);
    const Point x0{0.5, -0.5, 0.5, 0.0, 1.0};
    const ProjectionResult r = nearest_point_on_manifold(m, x0, omega);
    REQUIRE(r.converged);
    const double r0 = std::sqrt(0.25 * 3 + 1.0);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(r.point[i] - x0[i] / r0) <= 1e-4);
    }
}

TEST_CASE("zero gradient at the start raises")
{
    const Box omega = Box::cube(2, -3.0, 3.0);
    CHECK_THROWS_AS(nearest_point_on_manifold(unit_circle(), Point{0.0, 0.0}, omega), DegenerateGradientError);
}

TEST_CASE("clamping to the state space")
{
    // The zero set lies outside omega, so no feasible point exists.
    const Box omega = Box::cube(2, -0.5, 0.5);
    const ProjectionResult r = nearest_point_on_manifold(unit_circle(), Point{0.4, 0.1}, omega);
    CHECK_FALSE(r.converged);
    CHECK(omega.contains(r.point));
    CHECK(r.residual > 1e-6);
}

TEST_CASE("dimension mismatch")
{
    CHECK_THROWS_AS(nearest_point_on_manifold(unit_circle(), Point{1.0, 0.0, 0.0}, Box::cube(3, -1, 1)),
                    std::invalid_argument);
}

TEST_CASE("options JSON round trip")
{
    ProjectionOptions o;
    o.max_iter = 17;
    o.max_restarts = 5;
    o.residual_tol = 1e-8;
    const ProjectionOptions back = nlohmann::json(o).get<ProjectionOptions>();
    CHECK(back.max_iter == 17);
    CHECK(back.max_restarts == 5);
    CHECK(back.residual_tol == 1e-8);
}

TEST_CASE("trained models: first-order conditions and dense-sampling oracle")
{
    const Box omega = Box::cube(2, -3.0, 3.0);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int converged = 0;
    int total = 0;
    for (int model_k = 0; model_k < 2; ++model_k) {
        std::vector<Point> pts;
        std::vector<Label> labels;
        for (int k = 0; k < 40; ++k) {
            Point p{u(rng), u(rng)};
            labels.push_back(label_of(p[0] * p[0] + 2.0 * p[1] * p[1] + 0.5 * p[0] * p[1] <= 3.0));
            pts.push_back(std::move(p));
        }
        pts.push_back({0.0, 0.0});
        labels.push_back(Label::positive);
        const Calibration cal = calibrate_gamma(pts, labels, GammaSchedule{0.1 * omega.diameter(), 2.0, 30});
        const std::vector<Point> oracle = zero_set_points(cal.model, omega, 2001);
        REQUIRE(!oracle.empty());
        for (int k = 0; k < 10; ++k) {
            const Point x0{u(rng), u(rng)};
            ProjectionResult r;
            try {
                r = nearest_point_on_manifold(cal.model, x0, omega);
            } catch (const DegenerateGradientError &) {
                continue;
            }
            ++total;
            if (!r.converged) {
                continue;
            }
            ++converged;
            CHECK(std::abs(decision_value(cal.model, r.point)) <= 1e-6);
            if (!r.clamped) {
                // x* - x0 parallel to the gradient.
                const Point g = decision_gradient(cal.model, r.point);
                const double cross = (r.point[0] - x0[0]) * g[1] - (r.point[1] - x0[1]) * g[0];
                CHECK(std::abs(cross) <= 1e-3 * r.distance * std::hypot(g[0], g[1]) + 1e-12);
            }
            double best = std::numeric_limits<double>::infinity();
            for (const auto &p : oracle) {
                best = std::min(best, dist(p, x0));
            }
            CHECK(r.distance <= best + 1e-3 * omega.diameter());
        }
    }
    MESSAGE("converged " << converged << " of " << total);
    CHECK(converged >= total * 3 / 4);
}
