#ifndef SETINV_SVM_HPP
#define SETINV_SVM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "setinv/errors.hpp"
#include "setinv/forward_models.hpp"
#include "setinv/geometry.hpp"

namespace setinv {

// exp(-|x - y|^2 / (2 gamma^2))
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Decision function psi(x) = b + sum_k beta_k y_k K(x_k, x) of a Gaussian-kernel SVM.
// Only points with beta_k > 0 are stored.
class SvmModel {
public:
    SvmModel() = default;
    SvmModel(std::vector<Point> support_points, std::vector<Label> support_labels,
             std::vector<double> coefficients, double bias, double gamma, double box_bound);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<Label> &support_labels() const { return labels_; }
    const std::vector<double> &coefficients() const { return coefficients_; }
    double bias() const { return bias_; }
    double gamma() const { return gamma_; }
    double box_bound() const { return box_bound_; }
    Point support_point(std::size_t k) const;
    std::span<const double> support_span(std::size_t k) const { return {points_.data() + k * dim_, dim_}; }

    // |sum_k beta_k y_k|
    double equality_residual() const;

private:
    friend double decision_value(const SvmModel &, std::span<const double>);
    friend double decision_value_and_gradient(const SvmModel &, std::span<const double>, std::span<double>);

    std::size_t dim_ = 0;
    std::vector<double> points_; // row-major, size() x dim_
    std::vector<Label> labels_;
    std::vector<double> coefficients_;
    std::vector<double> weights_; // beta_k * y_k
    double bias_ = 0.0;
    double gamma_ = 1.0;
    double box_bound_ = 1e6;
};

double decision_value(const SvmModel &model, std::span<const double> x);

// Positive on ties (decision value exactly 0).
Label predict(const SvmModel &model, std::span<const double> x);

Point decision_gradient(const SvmModel &model, std::span<const double> x);

// Writes the gradient into grad (size dim) and returns the decision value.
double decision_value_and_gradient(const SvmModel &model, std::span<const double> x, std::span<double> grad);

// Number of points where predict disagrees with the label.
std::size_t training_errors(const SvmModel &model, std::span<const Point> points, std::span<const Label> labels);

void to_json(nlohmann::json &j, const SvmModel &m);
void from_json(const nlohmann::json &j, SvmModel &m);

struct TrainOptions {
    double box_bound = 1e6;
    double kkt_tol = 1e-6;
    std::size_t max_iter = 200000;
    // SMO iterations between direct solves on the free set (0 disables).
    std::size_t polish_every = 1000;
    // Kernel matrices are materialized up to this many samples.
    std::size_t cache_limit = 4096;
};

class TrainingError : public RunError {
public:
    TrainingError(const std::string &what, double kkt_violation) : RunError(what), kkt_violation_(kkt_violation) {}
    double kkt_violation() const { return kkt_violation_; }

private:
    double kkt_violation_;
};

struct TrainResult {
    SvmModel model;
    bool converged = false;
    std::size_t iterations = 0;
    // Maximal violating pair gap at exit.
    double kkt_gap = 0.0;
    std::size_t training_errors = 0;
    // Full dual vector, one entry per training sample.
    std::vector<double> beta;
};

// Two-coordinate (SMO) solver for the Gaussian-kernel SVM dual
//   max sum beta - 1/2 sum sum beta_k beta_j y_k y_j K(x_k, x_j)
//   s.t. sum beta_k y_k = 0, 0 <= beta_k <= L.
// Samples are added incrementally; squared distances are cached so that a new
// gamma only costs one exp per pair, and the last converged beta warm-starts
// the next solve.
class SvmTrainer {
public:
    explicit SvmTrainer(TrainOptions opts = {});

    // Throws std::invalid_argument on a duplicate point with the opposite label.
    void add_sample(Point x, Label y);

    std::size_t size() const { return labels_.size(); }
    std::size_t count(Label y) const;
    const std::vector<Point> &points() const { return points_; }
    const std::vector<Label> &labels() const { return labels_; }
    const TrainOptions &options() const { return opts_; }

    // Solves the dual at the given gamma. beta is committed only on convergence.
    TrainResult train(double gamma);

    const std::vector<double> &beta() const { return beta_; }
    void reset_beta();
    // Replaces the warm-start vector; must be dual feasible.
    void set_beta(std::vector<double> beta);

    // Largest per-sample KKT violation of the committed beta: free points must
    // sit on the margin, beta = 0 outside it, beta = L inside it.
    double max_kkt_violation(const SvmModel &model) const;

private:
    void set_gamma(double gamma);
    const double *kernel_row(std::size_t i, std::vector<double> &scratch) const;
    double kernel(std::size_t i, std::size_t j) const;
    bool cached() const { return size() <= opts_.cache_limit; }

    TrainOptions opts_;
    std::vector<Point> points_;
    std::vector<Label> labels_;
    std::vector<double> beta_;
    std::vector<std::vector<double>> sqdist_;
    std::vector<std::vector<double>> kmat_;
    double gamma_ = 0.0;
    std::size_t kmat_rows_ = 0;
};

// One-shot training. Throws std::invalid_argument for single-class input and
// TrainingError when the solver does not converge within max_iter.
SvmModel train_svm(std::span<const Point> samples, std::span<const Label> labels, double gamma,
                   const TrainOptions &opts = {});

struct GammaSchedule {
    double gamma0 = 1.0;
    double growth = 2.0;
    int max_steps = 30;
};

enum class ScanDirection { none, down, up };
const char *to_string(ScanDirection d);

struct Calibration {
    double gamma = 0.0;
    SvmModel model;
    ScanDirection direction = ScanDirection::none;
    int steps = 0;
    std::size_t trials = 0;
};

class CalibrationError : public RunError {
public:
    CalibrationError(const std::string &what, std::size_t best_errors) : RunError(what), best_errors_(best_errors) {}
    std::size_t best_errors() const { return best_errors_; }

private:
    std::size_t best_errors_;
};

// Picks the widest kernel on the lattice gamma0 * growth^i, |i| <= max_steps,
// i <= 0, whose trained model has zero empirical error: the schedule runs from
// the smoothest boundary (gamma0) towards narrower kernels and stops at the first
// separating width. The search starts at lattice step `start` (the incumbent
// width during active learning): if that separates, wider steps are tried up to
// gamma0, otherwise narrower ones. If every narrower width fails, widths above
// gamma0 are scanned as a last resort.
Calibration calibrate_gamma(SvmTrainer &trainer, const GammaSchedule &schedule, int start = 0);

Calibration calibrate_gamma(std::span<const Point> samples, std::span<const Label> labels,
                            const GammaSchedule &schedule, const TrainOptions &opts = {});

} // namespace setinv

#endif
