#ifndef SETINV_BENCH_HPP
#define SETINV_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "setinv/active_sampler.hpp"
#include "setinv/forward_models.hpp"
#include "setinv/sivia.hpp"
#include "setinv/svm.hpp"

namespace setinv {

constexpr std::size_t kDefaultGridBudget = 100'000'000;

// Evenly spaced Cartesian grid with `resolution` points per dimension,
// endpoints included. Points are generated on demand; the last dimension
// varies fastest.
class Grid {
public:
    Grid(Box omega, std::size_t resolution, std::size_t point_budget = kDefaultGridBudget);

    const Box &box() const { return omega_; }
    std::size_t resolution() const { return resolution_; }
    std::size_t dim() const { return omega_.dim(); }
    std::size_t size() const { return size_; }

    double coordinate(std::size_t dim, std::size_t j) const;
    void point(std::size_t index, std::span<double> out) const;
    Point point(std::size_t index) const;
    std::vector<Point> points() const;

private:
    Box omega_;
    std::size_t resolution_;
    std::size_t size_;
};

Grid grid_testset(const Box &omega, std::size_t resolution, std::size_t point_budget = kDefaultGridBudget);

// Oracle labels for every grid point, in grid index order.
std::vector<Label> oracle_labels(const ProblemSpec &spec, const Grid &grid);

// Memoizes oracle_labels per (problem name, resolution).
class OracleGridCache {
public:
    const std::vector<Label> &labels(const ProblemSpec &spec, const Grid &grid);

    // Recomputes `samples` random entries; returns the number of mismatches.
    std::size_t verify(const ProblemSpec &spec, const Grid &grid, std::size_t samples, std::uint64_t seed);

private:
    std::map<std::pair<std::string, std::size_t>, std::vector<Label>> cache_;
};

// SVM labels on a full grid, using the separable structure of the Gaussian
// kernel on a Cartesian grid: K = prod_i exp(-(g_i - x_i)^2 / (2 gamma^2)).
// Agrees with predict() except where the decision value is within rounding of 0.
std::vector<Label> predict_grid(const SvmModel &model, const Grid &grid);

std::vector<Label> classify_grid(const Subpaving &sp, const Grid &grid);

using PointClassifier = std::function<Label(std::span<const double>)>;

// Mean wall time per call in microseconds over `calls` grid points (after a
// warmup pass over the same points).
double mean_prediction_us(const PointClassifier &classify, const Grid &grid, std::size_t calls = 10000);

struct AccuracyResult {
    double accuracy = 0.0;
    std::size_t points = 0;
    std::size_t correct = 0;
    double mean_predict_us = 0.0;
};

double accuracy_of(std::span<const Label> predicted, std::span<const Label> truth);

// Accuracy of a point classifier against the membership oracle; oracle
// evaluation is excluded from timing.
AccuracyResult evaluate_accuracy(const PointClassifier &classify, const ProblemSpec &spec, const Grid &grid,
                                 std::size_t timing_calls = 10000);
AccuracyResult evaluate_accuracy(const SvmModel &model, const ProblemSpec &spec, const Grid &grid,
                                 OracleGridCache *cache = nullptr, std::size_t timing_calls = 10000);
AccuracyResult evaluate_accuracy(const Subpaving &sp, const ProblemSpec &spec, const Grid &grid,
                                 OracleGridCache *cache = nullptr, std::size_t timing_calls = 10000);

// Table resolution and sample counts used for the built-in problems.
std::size_t default_resolution(const std::string &problem);
std::pair<std::size_t, std::size_t> default_sample_counts(const std::string &problem);

struct ProblemEntry {
    nlohmann::json problem; // name or inline spec
    bool run_oasis = true;
    bool run_sivia = true;
    std::optional<std::size_t> resolution;
    std::optional<std::size_t> n_init;
    std::optional<std::size_t> n_total;
    std::optional<double> epsilon;
};

struct SuiteConfig {
    std::vector<ProblemEntry> problems;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    OasisConfig oasis;
    std::size_t box_budget = kDefaultBoxBudget;
    std::size_t grid_budget = kDefaultGridBudget;
    std::size_t timing_calls = 10000;
};

SuiteConfig suite_from_json(const nlohmann::json &j);

enum class RowStatus { ok, run_error, resource_error };
const char *to_string(RowStatus s);

struct BenchRow {
    std::string problem;
    std::string method; // "oasis" or "sivia"
    std::uint64_t seed = 0;
    RowStatus status = RowStatus::ok;
    std::string message;
    double accuracy = 0.0;
    double training_seconds = 0.0;
    double predict_us = 0.0;
    // SIVIA only: lookup through the bucket index.
    double predict_us_indexed = 0.0;
    std::size_t resolution = 0;
    std::size_t n_samples = 0;
    std::size_t n_active = 0;
    std::size_t n_fallback = 0;
    std::size_t n_support = 0;
    // gamma for OASIS, epsilon for SIVIA.
    double parameter = 0.0;
    std::size_t n_boxes = 0;
};

struct SummaryRow {
    std::string problem;
    std::string method;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double training_seconds_mean = 0.0;
    double predict_us_mean = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<SummaryRow> summary() const;
};

using ProgressFn = std::function<void(const BenchRow &)>;

// Runs every configured method on every problem and seed. Failures become
// rows with a non-ok status instead of aborting the suite.
BenchReport run_benchmark(const SuiteConfig &config, const ProgressFn &progress = {});

// Individual rows, shared with the CLI subcommands.
BenchRow bench_oasis(const ProblemSpec &spec, const OasisConfig &config, const Grid &grid, OracleGridCache &cache,
                     std::size_t timing_calls, OasisRun *run_out = nullptr);
BenchRow bench_sivia(const ProblemSpec &spec, double epsilon, std::size_t box_budget, const Grid &grid,
                     OracleGridCache &cache, std::size_t timing_calls, Subpaving *sp_out = nullptr);

void write_report_csv(std::ostream &os, const BenchReport &report);
void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &summary);
void print_summary_table(std::ostream &os, const std::vector<SummaryRow> &summary);

} // namespace setinv

#endif
