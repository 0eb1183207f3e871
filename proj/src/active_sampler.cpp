#include "setinv/active_sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace setinv {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Point uniform_point(const Box &omega, std::mt19937_64 &rng)
{
    Point x(omega.dim());
    for (std::size_t i = 0; i < omega.dim(); ++i) {
        std::uniform_real_distribution<double> u(omega[i].lo(), omega[i].hi());
        x[i] = u(rng);
    }
    return x;
}

bool near_existing(const std::vector<LabeledSample> &samples, const Point &x, double tol)
{
    const double tol2 = tol * tol;
    for (const auto &s : samples) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = s.point[i] - x[i];
            d2 += d * d;
        }
        if (d2 <= tol2) {
            return true;
        }
    }
    return false;
}

} // namespace

const char *to_string(SampleOrigin o)
{
    switch (o) {
    case SampleOrigin::random:
        return "random";
    case SampleOrigin::active:
        return "active";
    case SampleOrigin::fallback_random:
        return "fallback-random";
    }
    return "?";
}

void to_json(nlohmann::json &j, const OasisConfig &c)
{
    j = {{"n_init", c.n_init},
         {"n_total", c.n_total},
         {"seed", c.seed},
         {"gamma0", c.schedule.gamma0},
         {"gamma_growth", c.schedule.growth},
         {"gamma_max_steps", c.schedule.max_steps},
         {"box_bound", c.train.box_bound},
         {"kkt_tol", c.train.kkt_tol},
         {"smo_max_iter", c.train.max_iter},
         {"projection", c.projection},
         {"duplicate_tol", c.duplicate_tol}};
}

void from_json(const nlohmann::json &j, OasisConfig &c)
{
    c.n_init = j.value("n_init", c.n_init);
    c.n_total = j.value("n_total", c.n_total);
    c.seed = j.value("seed", c.seed);
    c.schedule.gamma0 = j.value("gamma0", c.schedule.gamma0);
    c.schedule.growth = j.value("gamma_growth", c.schedule.growth);
    c.schedule.max_steps = j.value("gamma_max_steps", c.schedule.max_steps);
    c.train.box_bound = j.value("box_bound", c.train.box_bound);
    c.train.kkt_tol = j.value("kkt_tol", c.train.kkt_tol);
    c.train.max_iter = j.value("smo_max_iter", c.train.max_iter);
    if (j.contains("projection")) {
        c.projection = j.at("projection").get<ProjectionOptions>();
    }
    c.duplicate_tol = j.value("duplicate_tol", c.duplicate_tol);
}

std::vector<LabeledSample> sample_initial(const ProblemSpec &spec, std::size_t n_init, std::mt19937_64 &rng)
{
    if (n_init < 1) {
        throw std::invalid_argument("n_init must be at least 1");
    }
    std::vector<LabeledSample> out;
    out.reserve(n_init);
    std::size_t positives = 0;
    for (std::size_t k = 0; k < n_init; ++k) {
        Point x = uniform_point(spec.state_space, rng);
        const Label y = membership(spec, x);
        positives += y == Label::positive;
        out.push_back({std::move(x), y, SampleOrigin::random, 0});
    }
    if (positives > 0 && positives < n_init) {
        return out;
    }
    if (n_init < 2) {
        throw RunError("n_init = 1 cannot hold both labels");
    }
    const Label missing = positives == 0 ? Label::positive : Label::negative;
    const std::size_t budget = 100 * n_init;
    for (std::size_t drawn = n_init; drawn < budget; ++drawn) {
        Point x = uniform_point(spec.state_space, rng);
        if (membership(spec, x) == missing) {
            out.back() = {std::move(x), missing, SampleOrigin::random, 0};
            return out;
        }
    }
    throw RunError("only " + std::string(missing == Label::positive ? "negative" : "positive") +
                   " labels after " + std::to_string(budget) + " uniform draws on problem '" + spec.name +
                   "'; the target set may be empty or negligible in the state space");
}

OasisRun run_oasis(const ProblemSpec &spec, const OasisConfig &config, std::mt19937_64 &rng)
{
    if (config.n_init < 1 || config.n_init > config.n_total) {
        throw ConfigError("OASIS needs 1 <= n_init <= n_total");
    }
    const auto run_start = Clock::now();
    const Box &omega = spec.state_space;

    OasisRun run;
    run.samples = sample_initial(spec, config.n_init, rng);
    run.samples.reserve(config.n_total);

    SvmTrainer trainer(config.train);
    for (const auto &s : run.samples) {
        trainer.add_sample(s.point, s.label);
    }

    GammaSchedule schedule = config.schedule;
    if (!(schedule.gamma0 > 0.0)) {
        schedule.gamma0 = 0.1 * omega.diameter();
    }

    // The previous width is tried first.
    int incumbent = 0;
    auto calibrate = [&]() {
        try {
            Calibration c = calibrate_gamma(trainer, schedule, incumbent);
            incumbent = c.steps;
            return c;
        } catch (const CalibrationError &e) {
            throw OasisError(std::string("gamma calibration failed at sample ") + std::to_string(trainer.size()) +
                                 ": " + e.what(),
                             run.log);
        }
    };

    for (std::size_t n = config.n_init; n < config.n_total; ++n) {
        IterationLog entry;
        entry.iteration = static_cast<int>(n - config.n_init + 1);

        auto t0 = Clock::now();
        const Calibration cal = calibrate();
        entry.train_ms = ms_since(t0);
        entry.gamma = cal.gamma;
        entry.direction = cal.direction;
        entry.gamma_trials = cal.trials;

        Point x0 = uniform_point(omega, rng);
        t0 = Clock::now();
        ProjectionOptions popts = config.projection;
        popts.seed = config.projection.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(entry.iteration));
        Point next;
        SampleOrigin origin = SampleOrigin::active;
        try {
            const ProjectionResult proj = nearest_point_on_manifold(cal.model, x0, omega, popts);
            entry.residual = proj.residual;
            entry.distance = proj.distance;
            entry.sqp_iterations = proj.iterations;
            if (!proj.converged) {
                entry.fallback_reason = "not-converged";
            } else if (near_existing(run.samples, proj.point, config.duplicate_tol)) {
                entry.fallback_reason = "duplicate";
            } else {
                next = proj.point;
            }
        } catch (const DegenerateGradientError &) {
            entry.fallback_reason = "degenerate-gradient";
        }
        entry.project_ms = ms_since(t0);
        if (next.empty()) {
            entry.fallback = true;
            next = std::move(x0);
            origin = SampleOrigin::fallback_random;
        }

        const Label y = membership(spec, next);
        trainer.add_sample(next, y);
        run.samples.push_back({std::move(next), y, origin, entry.iteration});
        run.log.push_back(std::move(entry));
    }

    Calibration final_cal = calibrate();
    run.final_gamma = final_cal.gamma;
    run.final_model = std::move(final_cal.model);
    run.training_seconds = std::chrono::duration<double>(Clock::now() - run_start).count();
    return run;
}

OasisRun run_oasis(const ProblemSpec &spec, const OasisConfig &config)
{
    std::mt19937_64 rng(config.seed);
    return run_oasis(spec, config, rng);
}

void write_samples_csv(std::ostream &os, const std::vector<LabeledSample> &samples)
{
    const std::size_t dim = samples.empty() ? 0 : samples.front().point.size();
    for (std::size_t i = 0; i < dim; ++i) {
        os << 'x' << i << ',';
    }
    os << "label,origin,iteration\n";
    os.precision(17);
    for (const auto &s : samples) {
        for (double v : s.point) {
            os << v << ',';
        }
        os << static_cast<int>(s.label) << ',' << to_string(s.origin) << ',' << s.iteration << '\n';
    }
}

std::vector<LabeledSample> read_samples_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line)) {
        return {};
    }
    // Header: x0,...,x{d-1},label,origin,iteration
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 4) {
        throw std::invalid_argument("samples CSV header has too few columns");
    }
    const std::size_t dim = columns - 3;
    std::vector<LabeledSample> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        LabeledSample s;
        for (std::size_t i = 0; i < dim; ++i) {
            std::getline(ss, cell, ',');
            s.point.push_back(std::stod(cell));
        }
        std::getline(ss, cell, ',');
        s.label = std::stoi(cell) > 0 ? Label::positive : Label::negative;
        std::getline(ss, cell, ',');
        s.origin = cell == "active" ? SampleOrigin::active
                   : cell == "random" ? SampleOrigin::random
                                      : SampleOrigin::fallback_random;
        std::getline(ss, cell, ',');
        s.iteration = std::stoi(cell);
        out.push_back(std::move(s));
    }
    return out;
}

void write_iteration_log_csv(std::ostream &os, const std::vector<IterationLog> &log)
{
    os << "iteration,gamma,direction,gamma_trials,residual,distance,sqp_iterations,fallback,fallback_reason,"
          "train_ms,project_ms\n";
    os.precision(10);
    for (const auto &e : log) {
        os << e.iteration << ',' << e.gamma << ',' << to_string(e.direction) << ',' << e.gamma_trials << ','
           << e.residual << ',' << e.distance << ',' << e.sqp_iterations << ',' << (e.fallback ? 1 : 0) << ','
           << e.fallback_reason << ',' << e.train_ms << ',' << e.project_ms << '\n';
    }
}

} // namespace setinv
