#include "setinv/forward_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace setinv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const ProblemSpec &spec, std::size_t n)
{
    if (n != spec.input_dim()) {
        throw std::invalid_argument("point has dimension " + std::to_string(n) + ", problem '" + spec.name +
                                    "' expects " + std::to_string(spec.input_dim()));
    }
}

struct LVState {
    double u;
    double v;
};

LVState lv_rhs(const LVParams &p, LVState s)
{
    return {s.u * (p.p1 - p.p2 * s.v), -s.v * (p.p3 - p.p4 * s.u)};
}

LVState rk4_step(const LVParams &p, LVState s, double h)
{
    const LVState k1 = lv_rhs(p, s);
    const LVState k2 = lv_rhs(p, {s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v});
    const LVState k3 = lv_rhs(p, {s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v});
    const LVState k4 = lv_rhs(p, {s.u + h * k3.u, s.v + h * k3.v});
    return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

// Minimum over [0, h] of the cubic Hermite interpolant with end values y0, y1
// and end slopes d0, d1.
double hermite_min(double y0, double d0, double y1, double d1, double h)
{
    auto eval = [&](double s) {
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
               (s3 - s2) * h * d1;
    };
    // p'(s) = a s^2 + b s + c
    const double a = 6 * y0 + 3 * h * d0 - 6 * y1 + 3 * h * d1;
    const double b = -6 * y0 - 4 * h * d0 + 6 * y1 - 2 * h * d1;
    const double c = h * d0;
    double best = std::min(y0, y1);
    auto consider = [&](double s) {
        if (s > 0.0 && s < 1.0) {
            best = std::min(best, eval(s));
        }
    };
    if (std::abs(a) < 1e-300) {
        if (b != 0.0) {
            consider(-c / b);
        }
    } else {
        const double disc = b * b - 4 * a * c;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            consider((-b + r) / (2 * a));
            consider((-b - r) / (2 * a));
        }
    }
    return best;
}

} // namespace

std::string model_name(const ForwardModel &model)
{
    return std::visit(overloaded{
                          [](const Circle &) { return std::string("circle"); },
                          [](const DoughnutForm &) { return std::string("doughnut"); },
                          [](const SphereKD &) { return std::string("sphere"); },
                          [](const LotkaVolterraMinPrey &) { return std::string("lotka-volterra"); },
                      },
                      model);
}

std::size_t model_input_dim(const ForwardModel &model)
{
    return std::visit(overloaded{
                          [](const Circle &) -> std::size_t { return 2; },
                          [](const DoughnutForm &) -> std::size_t { return 2; },
                          [](const SphereKD &s) { return s.k; },
                          [](const LotkaVolterraMinPrey &) -> std::size_t { return 2; },
                      },
                      model);
}

bool has_inclusion(const ForwardModel &model)
{
    return !std::holds_alternative<LotkaVolterraMinPrey>(model);
}

ProblemSpec::ProblemSpec(std::string name_, ForwardModel forward_, Box target_, Box state_space_)
    : name(std::move(name_)), forward(std::move(forward_)), target(std::move(target_)),
      state_space(std::move(state_space_))
{
    if (const auto *s = std::get_if<SphereKD>(&forward); s != nullptr && s->k < 1) {
        throw ConfigError("sphere model requires k >= 1");
    }
    if (const auto *lv = std::get_if<LotkaVolterraMinPrey>(&forward)) {
        if (!(lv->u0 > 0 && lv->v0 > 0 && lv->horizon > 0 && lv->dt > 0 && lv->p1 > 0 && lv->p3 > 0)) {
            throw ConfigError("lotka-volterra model requires positive u0, v0, horizon, dt, p1 and p3");
        }
    }
    if (state_space.dim() != model_input_dim(forward)) {
        throw ConfigError("state space of '" + name + "' has dimension " + std::to_string(state_space.dim()) +
                          ", model expects " + std::to_string(model_input_dim(forward)));
    }
    if (target.dim() != 1) {
        throw ConfigError("all built-in forward models are scalar; target must be a 1-D box");
    }
    for (const auto &iv : state_space.intervals()) {
        if (!(iv.width() > 0.0)) {
            throw ConfigError("state space must have positive width in every dimension");
        }
    }
}

Point eval_forward(const ProblemSpec &spec, std::span<const double> x)
{
    check_dim(spec, x.size());
    return std::visit(overloaded{
                          [&](const Circle &) { return Point{x[0] * x[0] + x[1] * x[1]}; },
                          [&](const DoughnutForm &) { return Point{x[0] * x[0] + x[1] * x[1] + x[0] * x[1]}; },
                          [&](const SphereKD &) {
                              double s = 0.0;
                              for (double xi : x) {
                                  s += xi * xi;
                              }
                              return Point{s};
                          },
                          [&](const LotkaVolterraMinPrey &lv) {
                              const LVParams p{lv.p1, x[0], lv.p3, x[1]};
                              return Point{integrate_lv(p, lv.u0, lv.v0, lv.horizon, lv.dt, false).min_prey};
                          },
                      },
                      spec.forward);
}

Box eval_inclusion(const ProblemSpec &spec, const Box &b)
{
    check_dim(spec, b.dim());
    return std::visit(overloaded{
                          [&](const Circle &) { return Box{sq(b[0]) + sq(b[1])}; },
                          [&](const DoughnutForm &) { return Box{sq(b[0]) + sq(b[1]) + b[0] * b[1]}; },
                          [&](const SphereKD &) {
                              Interval s(0.0);
                              for (const auto &iv : b.intervals()) {
                                  s = s + sq(iv);
                              }
                              return Box{s};
                          },
                          [&](const LotkaVolterraMinPrey &) -> Box {
                              throw UnsupportedModelError("no inclusion function for the lotka-volterra model");
                          },
                      },
                      spec.forward);
}

Label membership(const ProblemSpec &spec, std::span<const double> x)
{
    const Point y = eval_forward(spec, x);
    return label_of(spec.target.contains(y));
}

LVTrajectory integrate_lv(const LVParams &params, double u0, double v0, double T, double dt, bool keep_trajectory)
{
    if (!(dt > 0.0) || !(T >= dt)) {
        throw std::invalid_argument("integrate_lv requires dt > 0 and T >= dt");
    }
    const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));

    LVTrajectory out;
    if (keep_trajectory) {
        out.t.reserve(steps + 1);
        out.u.reserve(steps + 1);
        out.v.reserve(steps + 1);
        out.t.push_back(0.0);
        out.u.push_back(u0);
        out.v.push_back(v0);
    }

    // Grid minimum plus the neighbouring states used for Hermite refinement.
    LVState cur{u0, v0};
    LVState at_min = cur;
    LVState before_min{};
    LVState after_min{};
    double h_before = 0.0;
    double h_after = 0.0;
    bool has_before = false;
    bool has_after = false;
    bool awaiting_after = true;
    double min_u = u0;
    for (std::size_t i = 0; i < steps; ++i) {
        const bool last = i + 1 == steps;
        const double h = last ? T - dt * static_cast<double>(steps - 1) : dt;
        const double t = last ? T : dt * static_cast<double>(i + 1);
        const LVState next = rk4_step(params, cur, h);
        if (!std::isfinite(next.u) || !std::isfinite(next.v)) {
            throw IntegrationError("lotka-volterra state became non-finite at t=" + std::to_string(t), t);
        }
        if (keep_trajectory) {
            out.t.push_back(t);
            out.u.push_back(next.u);
            out.v.push_back(next.v);
        }
        if (awaiting_after) {
            after_min = next;
            h_after = h;
            has_after = true;
            awaiting_after = false;
        }
        if (next.u < min_u) {
            min_u = next.u;
            before_min = cur;
            h_before = h;
            has_before = true;
            at_min = next;
            has_after = false;
            awaiting_after = true;
        }
        cur = next;
    }

    double refined = min_u;
    const LVState d_at = lv_rhs(params, at_min);
    if (has_before) {
        const LVState d = lv_rhs(params, before_min);
        refined = std::min(refined, hermite_min(before_min.u, d.u, at_min.u, d_at.u, h_before));
    }
    if (has_after) {
        const LVState d = lv_rhs(params, after_min);
        refined = std::min(refined, hermite_min(at_min.u, d_at.u, after_min.u, d.u, h_after));
    }
    out.min_prey = min_u;
    out.min_prey_interpolated = refined;
    return out;
}

double lv_first_integral(const LVParams &p, double u, double v)
{
    return p.p4 * u - p.p3 * std::log(u) + p.p2 * v - p.p1 * std::log(v);
}

std::vector<std::string> builtin_problem_names()
{
    return {"circle",    "ring",      "doughnut",  "sphere-3d",     "sphere-4d",
            "sphere-5d", "sphere-6d", "sphere-7d", "sphere-8d", "lotka-volterra"};
}

ProblemSpec builtin_problem(const std::string &name)
{
    const Box omega2d = Box::cube(2, -3.0, 3.0);
    if (name == "circle") {
        return ProblemSpec(name, Circle{}, Box{Interval(0.0, 2.0)}, omega2d);
    }
    if (name == "ring") {
        return ProblemSpec(name, Circle{}, Box{Interval(1.0, 2.0)}, omega2d);
    }
    if (name == "doughnut") {
        return ProblemSpec(name, DoughnutForm{}, Box{Interval(1.0, 2.0)}, omega2d);
    }
    if (name == "sphere-3d") {
        return ProblemSpec(name, SphereKD{3}, Box{Interval(0.0, 0.5)}, Box::cube(3, -1.5, 1.5));
    }
    if (name == "sphere-4d") {
        return ProblemSpec(name, SphereKD{4}, Box{Interval(0.0, 0.25)}, Box::cube(4, -1.0, 1.0));
    }
    if (name.size() == 9 && name.starts_with("sphere-") && name[8] == 'd' && name[7] >= '5' && name[7] <= '8') {
        const auto k = static_cast<std::size_t>(name[7] - '0');
        return ProblemSpec(name, SphereKD{k}, Box{Interval(0.0, 0.25)}, Box::cube(k, -0.75, 0.75));
    }
    if (name == "lotka-volterra") {
        // [10, inf) encoded with an upper bound far above any reachable prey level.
        return ProblemSpec(name, LotkaVolterraMinPrey{}, Box{Interval(10.0, 1e6)}, Box::cube(2, 0.01, 0.1));
    }
    throw ConfigError("unknown problem '" + name + "'");
}

namespace {

ForwardModel model_from_json(const std::string &model, const nlohmann::json &params)
{
    if (model == "circle") {
        return Circle{};
    }
    if (model == "doughnut") {
        return DoughnutForm{};
    }
    if (model == "sphere") {
        return SphereKD{params.value("k", std::size_t{0})};
    }
    if (model == "lotka-volterra") {
        LotkaVolterraMinPrey lv;
        lv.p1 = params.value("p1", lv.p1);
        lv.p3 = params.value("p3", lv.p3);
        lv.u0 = params.value("u0", lv.u0);
        lv.v0 = params.value("v0", lv.v0);
        lv.horizon = params.value("horizon", lv.horizon);
        lv.dt = params.value("dt", lv.dt);
        return lv;
    }
    throw ConfigError("unknown model '" + model + "'");
}

nlohmann::json model_params_to_json(const ForwardModel &model)
{
    return std::visit(overloaded{
                          [](const Circle &) { return nlohmann::json::object(); },
                          [](const DoughnutForm &) { return nlohmann::json::object(); },
                          [](const SphereKD &s) { return nlohmann::json{{"k", s.k}}; },
                          [](const LotkaVolterraMinPrey &lv) {
                              return nlohmann::json{{"p1", lv.p1}, {"p3", lv.p3},           {"u0", lv.u0},
                                                    {"v0", lv.v0}, {"horizon", lv.horizon}, {"dt", lv.dt}};
                          },
                      },
                      model);
}

} // namespace

ProblemSpec problem_from_json(const nlohmann::json &j)
{
    try {
        if (j.is_string()) {
            return builtin_problem(j.get<std::string>());
        }
        if (!j.is_object()) {
            throw ConfigError("problem must be a name or an object");
        }
        if (j.contains("name") && !j.contains("model")) {
            ProblemSpec spec = builtin_problem(j.at("name").get<std::string>());
            if (j.contains("target")) {
                spec = ProblemSpec(spec.name, spec.forward, j.at("target").get<Box>(), spec.state_space);
            }
            if (j.contains("state_space")) {
                spec = ProblemSpec(spec.name, spec.forward, spec.target, j.at("state_space").get<Box>());
            }
            return spec;
        }
        const auto model = j.at("model").get<std::string>();
        const auto params = j.value("params", nlohmann::json::object());
        return ProblemSpec(j.value("name", model), model_from_json(model, params), j.at("target").get<Box>(),
                           j.at("state_space").get<Box>());
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad problem config: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("bad problem config: ") + e.what());
    }
}

nlohmann::json problem_to_json(const ProblemSpec &spec)
{
    return {{"name", spec.name},
            {"model", model_name(spec.forward)},
            {"params", model_params_to_json(spec.forward)},
            {"target", spec.target},
            {"state_space", spec.state_space}};
}

} // namespace setinv
