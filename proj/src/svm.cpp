#include "setinv/svm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace setinv {

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kPolishMaxFree = 256;

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double inv_two_gamma_sq(double gamma)
{
    return 1.0 / (2.0 * gamma * gamma);
}

void check_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("kernel width gamma must be positive, got " + std::to_string(gamma));
    }
}

} // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma)
{
    check_gamma(gamma);
    if (x.size() != y.size()) {
        throw std::invalid_argument("rbf_kernel: dimension mismatch");
    }
    return std::exp(-squared_distance(x, y) * inv_two_gamma_sq(gamma));
}

SvmModel::SvmModel(std::vector<Point> support_points, std::vector<Label> support_labels,
                   std::vector<double> coefficients, double bias, double gamma, double box_bound)
    : labels_(std::move(support_labels)), coefficients_(std::move(coefficients)), bias_(bias), gamma_(gamma),
      box_bound_(box_bound)
{
    check_gamma(gamma);
    if (support_points.size() != labels_.size() || labels_.size() != coefficients_.size()) {
        throw std::invalid_argument("support points, labels and coefficients must have equal length");
    }
    if (support_points.empty()) {
        throw std::invalid_argument("model needs at least one support point");
    }
    dim_ = support_points.front().size();
    points_.reserve(support_points.size() * dim_);
    weights_.reserve(labels_.size());
    for (std::size_t k = 0; k < support_points.size(); ++k) {
        if (support_points[k].size() != dim_) {
            throw std::invalid_argument("support points have inconsistent dimensions");
        }
        if (coefficients_[k] < 0.0 || coefficients_[k] > box_bound_) {
            throw std::invalid_argument("coefficient outside [0, L]");
        }
        points_.insert(points_.end(), support_points[k].begin(), support_points[k].end());
        weights_.push_back(coefficients_[k] * sign(labels_[k]));
    }
}

Point SvmModel::support_point(std::size_t k) const
{
    const auto s = support_span(k);
    return {s.begin(), s.end()};
}

double SvmModel::equality_residual() const
{
    double s = 0.0;
    for (double w : weights_) {
        s += w;
    }
    return std::abs(s);
}

double decision_value(const SvmModel &model, std::span<const double> x)
{
    if (x.size() != model.dim_) {
        throw std::invalid_argument("decision_value: point dimension " + std::to_string(x.size()) +
                                    " does not match model dimension " + std::to_string(model.dim_));
    }
    const double c = inv_two_gamma_sq(model.gamma_);
    const std::size_t n = model.weights_.size();
    const double *p = model.points_.data();
    double sum = model.bias_;
    for (std::size_t k = 0; k < n; ++k, p += model.dim_) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < model.dim_; ++i) {
            const double d = x[i] - p[i];
            d2 += d * d;
        }
        sum += model.weights_[k] * std::exp(-d2 * c);
    }
    return sum;
}

Label predict(const SvmModel &model, std::span<const double> x)
{
    return label_of(decision_value(model, x) >= 0.0);
}

double decision_value_and_gradient(const SvmModel &model, std::span<const double> x, std::span<double> grad)
{
    if (x.size() != model.dim_ || grad.size() != model.dim_) {
        throw std::invalid_argument("decision_gradient: dimension mismatch");
    }
    const double c = inv_two_gamma_sq(model.gamma_);
    const double inv_g2 = 1.0 / (model.gamma_ * model.gamma_);
    std::fill(grad.begin(), grad.end(), 0.0);
    const double *p = model.points_.data();
    double sum = model.bias_;
    for (std::size_t k = 0; k < model.weights_.size(); ++k, p += model.dim_) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < model.dim_; ++i) {
            const double d = x[i] - p[i];
            d2 += d * d;
        }
        const double term = model.weights_[k] * std::exp(-d2 * c);
        sum += term;
        for (std::size_t i = 0; i < model.dim_; ++i) {
            grad[i] += term * (p[i] - x[i]) * inv_g2;
        }
    }
    return sum;
}

Point decision_gradient(const SvmModel &model, std::span<const double> x)
{
    Point g(x.size());
    decision_value_and_gradient(model, x, g);
    return g;
}

std::size_t training_errors(const SvmModel &model, std::span<const Point> points, std::span<const Label> labels)
{
    std::size_t errors = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (predict(model, points[k]) != labels[k]) {
            ++errors;
        }
    }
    return errors;
}

void to_json(nlohmann::json &j, const SvmModel &m)
{
    nlohmann::json pts = nlohmann::json::array();
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
        pts.push_back(m.support_point(k));
        labels.push_back(static_cast<int>(m.support_labels()[k]));
    }
    j = {{"kernel", "rbf"},        {"gamma", m.gamma()},    {"bias", m.bias()},
         {"box_bound", m.box_bound()}, {"support_points", pts}, {"support_labels", labels},
         {"coefficients", m.coefficients()}};
}

void from_json(const nlohmann::json &j, SvmModel &m)
{
    std::vector<Point> pts = j.at("support_points").get<std::vector<Point>>();
    std::vector<Label> labels;
    for (int y : j.at("support_labels").get<std::vector<int>>()) {
        if (y != 1 && y != -1) {
            throw std::invalid_argument("support labels must be +1 or -1");
        }
        labels.push_back(static_cast<Label>(y));
    }
    m = SvmModel(std::move(pts), std::move(labels), j.at("coefficients").get<std::vector<double>>(),
                 j.at("bias").get<double>(), j.at("gamma").get<double>(), j.value("box_bound", 1e6));
}

SvmTrainer::SvmTrainer(TrainOptions opts) : opts_(opts)
{
    if (!(opts_.box_bound > 0.0) || !(opts_.kkt_tol > 0.0)) {
        throw std::invalid_argument("box bound and KKT tolerance must be positive");
    }
}

void SvmTrainer::add_sample(Point x, Label y)
{
    if (!points_.empty() && x.size() != points_.front().size()) {
        throw std::invalid_argument("sample dimension mismatch");
    }
    const std::size_t n = points_.size();
    std::vector<double> row(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = squared_distance(x, points_[j]);
        if (row[j] == 0.0 && labels_[j] != y) {
            throw std::invalid_argument("duplicate point with conflicting labels");
        }
    }
    points_.push_back(std::move(x));
    labels_.push_back(y);
    beta_.push_back(0.0);
    if (n + 1 <= opts_.cache_limit) {
        for (std::size_t j = 0; j < n; ++j) {
            sqdist_[j].push_back(row[j]);
        }
        sqdist_.push_back(std::move(row));
    } else {
        sqdist_.clear();
        sqdist_.shrink_to_fit();
        kmat_.clear();
        kmat_.shrink_to_fit();
        kmat_rows_ = 0;
    }
}

std::size_t SvmTrainer::count(Label y) const
{
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

void SvmTrainer::reset_beta()
{
    std::fill(beta_.begin(), beta_.end(), 0.0);
}

void SvmTrainer::set_beta(std::vector<double> beta)
{
    if (beta.size() != size()) {
        throw std::invalid_argument("beta has the wrong length");
    }
    beta_ = std::move(beta);
}

void SvmTrainer::set_gamma(double gamma)
{
    if (!cached()) {
        gamma_ = gamma;
        return;
    }
    const std::size_t n = size();
    const double c = inv_two_gamma_sq(gamma);
    if (gamma != gamma_) {
        kmat_rows_ = 0;
    }
    kmat_.resize(n);
    // Rows computed under the current gamma are extended, the rest rebuilt.
    for (std::size_t i = 0; i < n; ++i) {
        auto &row = kmat_[i];
        const std::size_t start = i < kmat_rows_ ? row.size() : 0;
        row.resize(n);
        for (std::size_t j = start; j < n; ++j) {
            row[j] = std::exp(-sqdist_[i][j] * c);
        }
    }
    kmat_rows_ = n;
    gamma_ = gamma;
}

double SvmTrainer::kernel(std::size_t i, std::size_t j) const
{
    if (cached()) {
        return kmat_[i][j];
    }
    return std::exp(-squared_distance(points_[i], points_[j]) * inv_two_gamma_sq(gamma_));
}

const double *SvmTrainer::kernel_row(std::size_t i, std::vector<double> &scratch) const
{
    if (cached()) {
        return kmat_[i].data();
    }
    const double c = inv_two_gamma_sq(gamma_);
    scratch.resize(size());
    for (std::size_t j = 0; j < size(); ++j) {
        scratch[j] = std::exp(-squared_distance(points_[i], points_[j]) * c);
    }
    return scratch.data();
}

TrainResult SvmTrainer::train(double gamma)
{
    check_gamma(gamma);
    if (count(Label::positive) == 0 || count(Label::negative) == 0) {
        throw std::invalid_argument("training needs at least one sample of each label");
    }
    set_gamma(gamma);

    const std::size_t n = size();
    const double C = opts_.box_bound;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = sign(labels_[t]);
    }
    std::vector<double> alpha = beta_;

    // G = Q alpha - e with Q_ij = y_i y_j K_ij.
    std::vector<double> G(n, -1.0);
    std::vector<double> scratch_i;
    std::vector<double> scratch_j;
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] > 0.0) {
            const double *Kj = kernel_row(j, scratch_j);
            for (std::size_t t = 0; t < n; ++t) {
                G[t] += y[t] * y[j] * Kj[t] * alpha[j];
            }
        }
    }

    auto is_upper = [&](std::size_t t) { return alpha[t] >= C; };
    auto is_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    // max over I_up of -y G minus min over I_low of -y G.
    auto violation_gap = [&](const std::vector<double> &a, const std::vector<double> &g) {
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * g[t];
            const bool in_up = y[t] > 0 ? a[t] < C : a[t] > 0.0;
            const bool in_low = y[t] > 0 ? a[t] > 0.0 : a[t] < C;
            if (in_up) {
                up = std::max(up, v);
            }
            if (in_low) {
                low = std::min(low, v);
            }
        }
        return up - low;
    };

    // Primal active-set refinement from the current feasible point: solve the
    // KKT equations on the free set with the bounded variables fixed, step
    // towards that solution until a variable reaches a bound, and free the
    // worst KKT violator once the step is full. Kept when it lowers the gap.
    auto polish = [&](double current_gap) {
        std::vector<double> a = alpha;
        std::vector<double> g(n);
        std::vector<double> row;
        std::vector<char> free(n, 0);
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < n; ++t) {
            free[t] = a[t] > 0.0 && a[t] < C;
            n_free += free[t];
        }
        // Dense solves get too slow past this; SMO copes there.
        if (n_free > kPolishMaxFree) {
            return false;
        }
        auto gradient = [&]() {
            std::fill(g.begin(), g.end(), -1.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (a[j] > 0.0) {
                    const double *Kj = kernel_row(j, row);
                    for (std::size_t t = 0; t < n; ++t) {
                        g[t] += y[t] * y[j] * Kj[t] * a[j];
                    }
                }
            }
        };
        const std::size_t max_rounds = std::min<std::size_t>(4 * n + 16, 64);
        for (std::size_t round = 0; round < max_rounds; ++round) {
            std::vector<std::size_t> idx;
            for (std::size_t t = 0; t < n; ++t) {
                if (free[t]) {
                    idx.push_back(t);
                }
            }
            const std::size_t m = idx.size();
            const auto M = static_cast<Eigen::Index>(m);
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M + 1, M + 1);
            Eigen::VectorXd rhs(M + 1);
            double bound_balance = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                if (!free[t] && a[t] >= C) {
                    bound_balance += y[t] * C;
                }
            }
            for (std::size_t r = 0; r < m; ++r) {
                const std::size_t i = idx[r];
                const double *Ki = kernel_row(i, row);
                const auto ri = static_cast<Eigen::Index>(r);
                for (std::size_t c = 0; c < m; ++c) {
                    A(ri, static_cast<Eigen::Index>(c)) = y[i] * y[idx[c]] * Ki[idx[c]];
                }
                A(ri, M) = y[i];
                A(M, ri) = y[i];
                double fixed = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    if (!free[t] && a[t] >= C) {
                        fixed += y[t] * Ki[t] * C;
                    }
                }
                rhs(ri) = 1.0 - y[i] * fixed;
            }
            rhs(M) = -bound_balance;
            const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
            if (!sol.allFinite()) {
                break;
            }

            double step = 1.0;
            std::size_t blocking = n;
            for (std::size_t r = 0; r < m; ++r) {
                const std::size_t i = idx[r];
                const double z = sol(static_cast<Eigen::Index>(r));
                if (z < 0.0 && a[i] - z > 0.0) {
                    const double t = a[i] / (a[i] - z);
                    if (t < step) {
                        step = t;
                        blocking = i;
                    }
                } else if (z > C && z - a[i] > 0.0) {
                    const double t = (C - a[i]) / (z - a[i]);
                    if (t < step) {
                        step = t;
                        blocking = i;
                    }
                }
            }
            for (std::size_t r = 0; r < m; ++r) {
                const std::size_t i = idx[r];
                a[i] = std::clamp(a[i] + step * (sol(static_cast<Eigen::Index>(r)) - a[i]), 0.0, C);
            }
            if (blocking != n) {
                a[blocking] = a[blocking] < 0.5 * C ? 0.0 : C;
                free[blocking] = 0;
                continue;
            }

            // y psi - 1 = G + y b on every sample.
            const double bias = sol(M);
            gradient();
            double worst = 0.5 * opts_.kkt_tol;
            std::size_t enter = n;
            for (std::size_t t = 0; t < n; ++t) {
                if (free[t]) {
                    continue;
                }
                const double slack = g[t] + y[t] * bias;
                const double v = a[t] <= 0.0 ? -slack : slack;
                if (v > worst) {
                    worst = v;
                    enter = t;
                }
            }
            if (enter == n) {
                break;
            }
            free[enter] = 1;
        }
        gradient();
        const double new_gap = violation_gap(a, g);
        if (!(new_gap < current_gap)) {
            return false;
        }
        alpha = std::move(a);
        G = std::move(g);
        return true;
    };

    TrainResult result;
    double gap = std::numeric_limits<double>::infinity();
    std::size_t polish_interval = opts_.polish_every;
    std::size_t next_polish = opts_.polish_every;
    std::size_t iter = 0;
    for (; iter < opts_.max_iter; ++iter) {
        // Maximal violating i, then j by second-order gain.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!is_upper(t) && -G[t] >= gmax) {
                    gmax = -G[t];
                    i = t;
                }
            } else if (!is_lower(t) && G[t] >= gmax) {
                gmax = G[t];
                i = t;
            }
        }
        if (i == n) {
            gap = 0.0;
            break;
        }
        const double *Ki = kernel_row(i, scratch_i);
        double gmax2 = -std::numeric_limits<double>::infinity();
        double obj_min = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            double grad_diff;
            if (y[t] > 0) {
                if (is_lower(t)) {
                    continue;
                }
                gmax2 = std::max(gmax2, G[t]);
                grad_diff = gmax + G[t];
            } else {
                if (is_upper(t)) {
                    continue;
                }
                gmax2 = std::max(gmax2, -G[t]);
                grad_diff = gmax - G[t];
            }
            if (grad_diff > 0.0) {
                double quad = 2.0 - 2.0 * Ki[t];
                quad = quad > 0.0 ? quad : kTau;
                const double obj = -(grad_diff * grad_diff) / quad;
                if (obj <= obj_min) {
                    obj_min = obj;
                    j = t;
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < opts_.kkt_tol || j == n) {
            break;
        }
        if (opts_.polish_every > 0 && iter >= next_polish) {
            if (polish(gap)) {
                next_polish = iter + opts_.polish_every;
                gap = violation_gap(alpha, G);
                if (gap < opts_.kkt_tol) {
                    break;
                }
                continue;
            }
            // Rejected: back off.
            polish_interval *= 2;
            next_polish = iter + polish_interval;
        }

        const double *Kj = kernel_row(j, scratch_j);
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        double quad = 2.0 - 2.0 * Ki[j];
        quad = quad > 0.0 ? quad : kTau;
        if (y[i] != y[j]) {
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            G[t] += y[t] * (y[i] * Ki[t] * dai + y[j] * Kj[t] * daj);
        }
    }

    if (!(gap < opts_.kkt_tol) && polish(gap)) {
        gap = violation_gap(alpha, G);
    }

    // Bias: average over free points, midpoint of the feasible range otherwise.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yG = y[t] * G[t];
        if (is_upper(t)) {
            if (y[t] < 0) {
                ub = std::min(ub, yG);
            } else {
                lb = std::max(lb, yG);
            }
        } else if (is_lower(t)) {
            if (y[t] > 0) {
                ub = std::min(ub, yG);
            } else {
                lb = std::max(lb, yG);
            }
        } else {
            free_sum += yG;
            ++n_free;
        }
    }
    const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);

    std::vector<Point> sv;
    std::vector<Label> sv_labels;
    std::vector<double> sv_coef;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sv.push_back(points_[t]);
            sv_labels.push_back(labels_[t]);
            sv_coef.push_back(alpha[t]);
        }
    }
    result.model = SvmModel(std::move(sv), std::move(sv_labels), std::move(sv_coef), -rho, gamma, C);
    result.iterations = iter;
    result.kkt_gap = gap;
    result.converged = gap < opts_.kkt_tol;
    result.training_errors = training_errors(result.model, points_, labels_);
    if (result.converged) {
        beta_ = alpha;
    }
    result.beta = std::move(alpha);
    return result;
}

double SvmTrainer::max_kkt_violation(const SvmModel &model) const
{
    double worst = 0.0;
    const double C = opts_.box_bound;
    for (std::size_t t = 0; t < size(); ++t) {
        const double margin = sign(labels_[t]) * decision_value(model, points_[t]);
        double v;
        if (beta_[t] <= 0.0) {
            v = std::max(0.0, 1.0 - margin);
        } else if (beta_[t] >= C) {
            v = std::max(0.0, margin - 1.0);
        } else {
            v = std::abs(margin - 1.0);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

SvmModel train_svm(std::span<const Point> samples, std::span<const Label> labels, double gamma,
                   const TrainOptions &opts)
{
    if (samples.size() != labels.size()) {
        throw std::invalid_argument("samples and labels differ in length");
    }
    SvmTrainer trainer(opts);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        trainer.add_sample(samples[k], labels[k]);
    }
    TrainResult r = trainer.train(gamma);
    if (!r.converged) {
        throw TrainingError("SMO did not converge after " + std::to_string(r.iterations) +
                                " iterations (KKT gap " + std::to_string(r.kkt_gap) + ")",
                            r.kkt_gap);
    }
    return std::move(r.model);
}

const char *to_string(ScanDirection d)
{
    switch (d) {
    case ScanDirection::none:
        return "none";
    case ScanDirection::down:
        return "down";
    case ScanDirection::up:
        return "up";
    }
    return "?";
}

Calibration calibrate_gamma(SvmTrainer &trainer, const GammaSchedule &schedule, int start)
{
    if (!(schedule.gamma0 > 0.0) || !(schedule.growth > 1.0) || schedule.max_steps < 0) {
        throw std::invalid_argument("gamma schedule needs gamma0 > 0, growth > 1, max_steps >= 0");
    }
    const int lowest = -schedule.max_steps;
    const int highest = schedule.max_steps;
    start = std::clamp(start, lowest, 0);

    std::size_t trials = 0;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::optional<Calibration> found;
    std::vector<double> found_beta;

    // Trains at lattice step i; non-converged solves count as at least one error.
    auto separates = [&](int step) {
        const double gamma = schedule.gamma0 * std::pow(schedule.growth, step);
        ++trials;
        TrainResult r = trainer.train(gamma);
        const std::size_t err = r.converged ? r.training_errors : std::max<std::size_t>(r.training_errors, 1);
        best = std::min(best, err);
        if (err != 0) {
            return false;
        }
        found = Calibration{gamma, std::move(r.model), ScanDirection::none, step, 0};
        found_beta = std::move(r.beta);
        return true;
    };
    auto finish = [&](ScanDirection dir) {
        trainer.set_beta(std::move(found_beta));
        found->direction = dir;
        found->trials = trials;
        return std::move(*found);
    };

    if (separates(start)) {
        int step = start;
        // A failed attempt leaves the last separating model in place.
        while (step < 0 && separates(step + 1)) {
            ++step;
        }
        return finish(found->steps == start ? ScanDirection::none : ScanDirection::up);
    }
    for (int step = start - 1; step >= lowest; --step) {
        if (separates(step)) {
            return finish(ScanDirection::down);
        }
    }
    for (int step = std::max(start + 1, 1); step <= highest; ++step) {
        if (separates(step)) {
            return finish(ScanDirection::up);
        }
    }
    throw CalibrationError("no kernel width in the schedule separates the samples (best training error " +
                               std::to_string(best) + ")",
                           best);
}

Calibration calibrate_gamma(std::span<const Point> samples, std::span<const Label> labels,
                            const GammaSchedule &schedule, const TrainOptions &opts)
{
    if (samples.size() != labels.size()) {
        throw std::invalid_argument("samples and labels differ in length");
    }
    SvmTrainer trainer(opts);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        trainer.add_sample(samples[k], labels[k]);
    }
    return calibrate_gamma(trainer, schedule);
}

} // namespace setinv
