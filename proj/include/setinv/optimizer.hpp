#ifndef SETINV_OPTIMIZER_HPP
#define SETINV_OPTIMIZER_HPP

#include <cstdint>
#include <span>

#include <json.hpp>

#include "setinv/errors.hpp"
#include "setinv/geometry.hpp"
#include "setinv/svm.hpp"

namespace setinv {

struct ProjectionOptions {
    double residual_tol = 1e-6;
    int max_iter = 100;
    int max_restarts = 3;
    // Iterations without merit decrease before a perturbed restart.
    int stall_iters = 10;
    double angle_tol = 1e-3;
    // Restart perturbation, as a fraction of the state-space diameter.
    double restart_scale = 1e-3;
    // Longest trial step, as a fraction of the state-space diameter.
    double max_step_scale = 0.25;
    std::uint64_t seed = 0x5eedULL;
};

void to_json(nlohmann::json &j, const ProjectionOptions &o);
void from_json(const nlohmann::json &j, ProjectionOptions &o);

struct ProjectionResult {
    Point point;
    double distance = 0.0;
    double residual = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
    // Some coordinate of the result sits on the state-space boundary.
    bool clamped = false;
};

class DegenerateGradientError : public RunError {
public:
    using RunError::RunError;
};

// Nearest point to x0 on the zero set of the decision function, by SQP with
// an identity Hessian and an l1 merit line search. Iterates are clamped to
// omega. Throws DegenerateGradientError when |grad psi| < 1e-12 at an iterate.
ProjectionResult nearest_point_on_manifold(const SvmModel &model, std::span<const double> x0, const Box &omega,
                                           const ProjectionOptions &opts = {});

} // namespace setinv

#endif
