#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "setinv/active_sampler.hpp"

using namespace setinv;

namespace {

OasisConfig small_config(std::size_t n_init, std::size_t n_total, std::uint64_t seed)
{
    OasisConfig c;
    c.n_init = n_init;
    c.n_total = n_total;
    c.seed = seed;
    return c;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

TEST_CASE("initial samples: uniform, oracle labelled, positives binomial")
{
    const ProblemSpec spec = builtin_problem("circle");
    std::size_t positives = 0;
    std::size_t total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        const auto s = sample_initial(spec, 100, rng);
        REQUIRE(s.size() == 100);
        for (const auto &p : s) {
            CHECK(spec.state_space.contains(p.point));
            CHECK(p.label == membership(spec, p.point));
            CHECK(p.origin == SampleOrigin::random);
            CHECK(p.iteration == 0);
            positives += p.label == Label::positive;
        }
        total += s.size();
    }
    // Area ratio 2 pi / 36, binomial sd about 17 over 2000 draws.
    const double p = 2.0 * M_PI / 36.0;
    const double mean = p * static_cast<double>(total);
    const double sd = std::sqrt(mean * (1.0 - p));
    CHECK(std::abs(static_cast<double>(positives) - mean) <= 4.0 * sd);
}

TEST_CASE("initial samples always hold both labels")
{
    const ProblemSpec spec = builtin_problem("circle");
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        std::mt19937_64 rng(seed);
        const auto s = sample_initial(spec, 3, rng);
        const auto pos = std::count_if(s.begin(), s.end(), [](const auto &x) { return x.label == Label::positive; });
        CHECK(pos > 0);
        CHECK(pos < 3);
    }
}

TEST_CASE("single-label problem is a run error")
{
    // Target unreachable from the state space.
    const ProblemSpec spec("empty", Circle{}, Box{{100.0, 200.0}}, Box::cube(2, -1.0, 1.0));
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(sample_initial(spec, 10, rng), RunError);
    CHECK_THROWS_AS(run_oasis(spec, small_config(10, 20, 1)), RunError);
}

TEST_CASE("invalid counts are config errors")
{
    const ProblemSpec spec = builtin_problem("circle");
    CHECK_THROWS_AS(run_oasis(spec, small_config(0, 10, 1)), ConfigError);
    CHECK_THROWS_AS(run_oasis(spec, small_config(20, 10, 1)), ConfigError);
}

TEST_CASE("n_total = n_init is passive training")
{
    const ProblemSpec spec = builtin_problem("circle");
    const OasisRun run = run_oasis(spec, small_config(50, 50, 3));
    CHECK(run.samples.size() == 50);
    CHECK(run.log.empty());
    std::mt19937_64 rng(3);
    const auto init = sample_initial(spec, 50, rng);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(run.samples[i].point == init[i].point);
    }
}

TEST_CASE("active run: sizes, labels, separability, determinism")
{
    const ProblemSpec spec = builtin_problem("circle");
    const OasisConfig cfg = small_config(30, 70, 11);
    const OasisRun a = run_oasis(spec, cfg);
    REQUIRE(a.samples.size() == 70);
    CHECK(a.log.size() == 40);
    std::vector<Point> pts;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto &s = a.samples[i];
        CHECK(spec.state_space.contains(s.point));
        CHECK(s.label == membership(spec, s.point));
        if (i >= 30) {
            CHECK(s.iteration == static_cast<int>(i - 29));
            CHECK(s.origin != SampleOrigin::random);
            CHECK((s.origin == SampleOrigin::fallback_random) == a.log[i - 30].fallback);
        }
        pts.push_back(s.point);
        labels.push_back(s.label);
    }
    CHECK(training_errors(a.final_model, pts, labels) == 0);
    CHECK(a.final_gamma == a.final_model.gamma());

    const OasisRun b = run_oasis(spec, cfg);
    REQUIRE(b.samples.size() == a.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].point == b.samples[i].point);
    }
    CHECK(a.final_gamma == b.final_gamma);
}

TEST_CASE("active samples concentrate near the boundary")
{
    const ProblemSpec spec = builtin_problem("circle");
    int closer = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const OasisRun run = run_oasis(spec, small_config(50, 150, seed));
        std::vector<double> active;
        for (const auto &s : run.samples) {
            if (s.origin == SampleOrigin::active) {
                active.push_back(std::abs(std::hypot(s.point[0], s.point[1]) - std::sqrt(2.0)));
            }
        }
        std::mt19937_64 rng(seed + 1000);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::vector<double> random(100);
        for (auto &d : random) {
            d = std::abs(std::hypot(u(rng), u(rng)) - std::sqrt(2.0));
        }
        REQUIRE(!active.empty());
        closer += median(active) < median(random);
    }
    CHECK(closer == 5);
}

TEST_CASE("samples CSV round trip")
{
    const OasisRun run = run_oasis(builtin_problem("doughnut"), small_config(20, 30, 2));
    std::stringstream ss;
    write_samples_csv(ss, run.samples);
    const auto back = read_samples_csv(ss);
    REQUIRE(back.size() == run.samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].point == run.samples[i].point);
        CHECK(back[i].label == run.samples[i].label);
        CHECK(back[i].origin == run.samples[i].origin);
        CHECK(back[i].iteration == run.samples[i].iteration);
    }

    std::stringstream log;
    write_iteration_log_csv(log, run.log);
    const std::string text = log.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}

TEST_CASE("config JSON round trip")
{
    OasisConfig c = small_config(7, 9, 42);
    c.schedule.growth = 1.5;
    c.train.kkt_tol = 1e-5;
    c.projection.max_iter = 33;
    const OasisConfig back = nlohmann::json(c).get<OasisConfig>();
    CHECK(back.n_init == 7);
    CHECK(back.n_total == 9);
    CHECK(back.seed == 42);
    CHECK(back.schedule.growth == 1.5);
    CHECK(back.train.kkt_tol == 1e-5);
    CHECK(back.projection.max_iter == 33);
}
