#include "setinv/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace setinv {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

bool on_boundary(const Box &omega, std::span<const double> x)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= omega[i].lo() || x[i] >= omega[i].hi()) {
            return true;
        }
    }
    return false;
}

// sin of the angle between r and g is at most tol (r = 0 counts as parallel).
bool parallel(std::span<const double> r, std::span<const double> g, double tol)
{
    const double rn = norm(r);
    const double gn = norm(g);
    if (rn == 0.0) {
        return true;
    }
    const double proj = dot(r, g) / (gn * gn);
    double off = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = r[i] - proj * g[i];
        off += d * d;
    }
    return std::sqrt(off) <= tol * rn;
}

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

// First zero of psi on the segment from x0 to the nearest support point of
// opposite sign, by a coarse scan and bisection. Empty if none brackets.
Point restoration_point(const SvmModel &model, std::span<const double> x0, double psi0)
{
    const std::size_t n = x0.size();
    std::size_t best = model.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < model.size(); ++k) {
        const auto sv = model.support_span(k);
        const double d = squared_distance(x0, sv);
        if (d < best_d && (decision_value(model, sv) > 0.0) != (psi0 > 0.0)) {
            best = k;
            best_d = d;
        }
    }
    if (best == model.size()) {
        return {};
    }
    const auto target = model.support_span(best);
    Point p(n);
    auto at = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = x0[i] + t * (target[i] - x0[i]);
        }
        return decision_value(model, p);
    };
    constexpr int kScan = 64;
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 1; k <= kScan; ++k) {
        const double t = static_cast<double>(k) / kScan;
        if ((at(t) > 0.0) != (psi0 > 0.0)) {
            lo = static_cast<double>(k - 1) / kScan;
            hi = t;
            break;
        }
    }
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        if ((at(mid) > 0.0) != (psi0 > 0.0)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi);
    return p;
}

} // namespace

void to_json(nlohmann::json &j, const ProjectionOptions &o)
{
    j = {{"residual_tol", o.residual_tol}, {"max_iter", o.max_iter},       {"restarts", o.max_restarts},
         {"stall_iters", o.stall_iters},   {"angle_tol", o.angle_tol},     {"restart_scale", o.restart_scale},
         {"max_step_scale", o.max_step_scale}, {"seed", o.seed}};
}

void from_json(const nlohmann::json &j, ProjectionOptions &o)
{
    o.residual_tol = j.value("residual_tol", o.residual_tol);
    o.max_iter = j.value("max_iter", o.max_iter);
    o.max_restarts = j.value("restarts", o.max_restarts);
    o.stall_iters = j.value("stall_iters", o.stall_iters);
    o.angle_tol = j.value("angle_tol", o.angle_tol);
    o.restart_scale = j.value("restart_scale", o.restart_scale);
    o.max_step_scale = j.value("max_step_scale", o.max_step_scale);
    o.seed = j.value("seed", o.seed);
}

ProjectionResult nearest_point_on_manifold(const SvmModel &model, std::span<const double> x0, const Box &omega,
                                           const ProjectionOptions &opts)
{
    const std::size_t n = x0.size();
    if (n != model.dim() || n != omega.dim()) {
        throw std::invalid_argument("nearest_point_on_manifold: dimension mismatch");
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double perturb = opts.restart_scale * omega.diameter();
    const double max_step = opts.max_step_scale * omega.diameter();

    Point x = omega.clamp(x0);
    Point g(n);
    Point r(n);
    Point d(n);
    Point trial(n);
    Point trial_g(n);

    auto merit = [&](std::span<const double> p, double psi, double mu) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = p[i] - x0[i];
            s += e * e;
        }
        return 0.5 * s + mu * std::abs(psi);
    };

    ProjectionResult res;
    Point restored;
    for (;;) {
        double mu = 1.0;
        int stalled = 0;
        double psi = decision_value_and_gradient(model, x, g);
        for (int iter = 0; iter < opts.max_iter && stalled < opts.stall_iters; ++iter) {
            ++res.iterations;
            const double gnorm = norm(g);
            if (gnorm < 1e-12) {
                throw DegenerateGradientError("decision function gradient vanishes during projection");
            }
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = x[i] - x0[i];
            }
            if (std::abs(psi) <= opts.residual_tol && (on_boundary(omega, x) || parallel(r, g, opts.angle_tol))) {
                res.converged = true;
                break;
            }

            // KKT system of min 1/2 |x + d - x0|^2 s.t. psi + g.d = 0.
            const double lambda = (psi - dot(g, r)) / (gnorm * gnorm);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -r[i] - lambda * g[i];
            }
            mu = std::max(mu, 1.5 * std::abs(lambda) + 1e-8);

            const double m0 = merit(x, psi, mu);
            const double slope = dot(r, d) - mu * std::abs(psi);
            const double dnorm = norm(d);
            double step = dnorm > max_step ? max_step / dnorm : 1.0;
            bool accepted = false;
            double trial_psi = psi;
            for (int ls = 0; ls < 40; ++ls) {
                for (std::size_t i = 0; i < n; ++i) {
                    trial[i] = std::clamp(x[i] + step * d[i], omega[i].lo(), omega[i].hi());
                }
                trial_psi = decision_value_and_gradient(model, trial, trial_g);
                if (merit(trial, trial_psi, mu) <= m0 + 1e-4 * step * std::min(slope, 0.0)) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (accepted) {
                x.swap(trial);
                g.swap(trial_g);
                psi = trial_psi;
                stalled = 0;
            } else {
                ++stalled;
            }
        }
        if (res.converged || res.restarts >= opts.max_restarts) {
            break;
        }
        ++res.restarts;
        // The first restart begins at a zero on a segment towards the data,
        // later ones at perturbations of it.
        if (restored.empty()) {
            restored = restoration_point(model, x0, decision_value(model, x0));
            if (restored.empty()) {
                restored.assign(x0.begin(), x0.end());
            }
            x = restored;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = restored[i] + perturb * gauss(rng);
            }
        }
        x = omega.clamp(x);
    }

    res.point = omega.clamp(x);
    res.residual = std::abs(decision_value(model, res.point));
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = res.point[i] - x0[i];
    }
    res.distance = norm(r);
    res.clamped = on_boundary(omega, res.point);
    if (res.residual > opts.residual_tol) {
        res.converged = false;
    }
    return res;
}

} // namespace setinv
