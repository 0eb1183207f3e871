#ifndef SETINV_FORWARD_MODELS_HPP
#define SETINV_FORWARD_MODELS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "setinv/errors.hpp"
#include "setinv/geometry.hpp"

namespace setinv {

enum class Label : int { negative = -1, positive = 1 };

constexpr double sign(Label y) { return static_cast<double>(static_cast<int>(y)); }
constexpr Label flip(Label y) { return y == Label::positive ? Label::negative : Label::positive; }
inline Label label_of(bool inside) { return inside ? Label::positive : Label::negative; }

// F(x, y) = x^2 + y^2
struct Circle {};

// F(x, y) = x^2 + y^2 + xy
struct DoughnutForm {};

// F(x) = sum x_i^2 over k coordinates
struct SphereKD {
    std::size_t k = 1;
};

// F(p2, p4) = minimum prey population over [0, horizon] of the Lotka-Volterra
// system with fixed prey birth rate p1 and predator death rate p3.
struct LotkaVolterraMinPrey {
    double p1 = 1.0;
    double p3 = 1.0;
    double u0 = 50.0;
    double v0 = 50.0;
    double horizon = 20.0;
    double dt = 1e-2;
};

using ForwardModel = std::variant<Circle, DoughnutForm, SphereKD, LotkaVolterraMinPrey>;

std::string model_name(const ForwardModel &model);
std::size_t model_input_dim(const ForwardModel &model);
bool has_inclusion(const ForwardModel &model);

// Set inversion problem: find { x in state_space : forward(x) in target }.
struct ProblemSpec {
    ProblemSpec(std::string name, ForwardModel forward, Box target, Box state_space);

    std::string name;
    ForwardModel forward;
    Box target;
    Box state_space;

    std::size_t input_dim() const { return state_space.dim(); }
    std::size_t output_dim() const { return target.dim(); }
};

Point eval_forward(const ProblemSpec &spec, std::span<const double> x);

// Natural interval extension of the forward model. Throws UnsupportedModelError
// for the ODE model.
Box eval_inclusion(const ProblemSpec &spec, const Box &b);

// Membership oracle: positive iff F(x) lies in the closed target box.
Label membership(const ProblemSpec &spec, std::span<const double> x);

struct LVParams {
    double p1;
    double p2;
    double p3;
    double p4;
};

class IntegrationError : public RunError {
public:
    IntegrationError(const std::string &what, double time) : RunError(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

struct LVTrajectory {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> v;
    // Minimum of u over the integration grid.
    double min_prey = 0.0;
    // Grid minimum refined by cubic Hermite interpolation on the neighbouring steps.
    double min_prey_interpolated = 0.0;
};

// Fixed-step classical RK4 on du/dt = u(p1 - p2 v), dv/dt = -v(p3 - p4 u).
// The grid is t_i = i * dt; a shorter final step lands exactly on T.
LVTrajectory integrate_lv(const LVParams &params, double u0, double v0, double T, double dt,
                          bool keep_trajectory = true);

// p4 u - p3 ln u + p2 v - p1 ln v, constant along exact trajectories.
double lv_first_integral(const LVParams &params, double u, double v);

// Built-in problems: circle, ring, doughnut, sphere-3d .. sphere-8d, lotka-volterra.
ProblemSpec builtin_problem(const std::string &name);
std::vector<std::string> builtin_problem_names();

// Accepts a problem name string, {"name": ...} with optional overrides, or an
// inline spec {"model", "params", "target", "state_space"}.
ProblemSpec problem_from_json(const nlohmann::json &j);
nlohmann::json problem_to_json(const ProblemSpec &spec);

} // namespace setinv

#endif
