#include "setinv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace setinv {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps timed classifier calls observable.
volatile int g_sink = 0;

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t limit)
{
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > limit / base) {
            return limit + 1;
        }
        r *= base;
    }
    return r;
}

} // namespace

Grid::Grid(Box omega, std::size_t resolution, std::size_t point_budget)
    : omega_(std::move(omega)), resolution_(resolution)
{
    if (resolution < 2) {
        throw std::invalid_argument("grid resolution must be at least 2");
    }
    size_ = checked_pow(resolution, omega_.dim(), point_budget);
    if (size_ > point_budget) {
        throw ResourceError("grid of " + std::to_string(resolution) + "^" + std::to_string(omega_.dim()) +
                            " points exceeds the point budget of " + std::to_string(point_budget));
    }
}

double Grid::coordinate(std::size_t dim, std::size_t j) const
{
    const Interval &iv = omega_[dim];
    if (j + 1 == resolution_) {
        return iv.hi();
    }
    return iv.lo() + iv.width() * static_cast<double>(j) / static_cast<double>(resolution_ - 1);
}

void Grid::point(std::size_t index, std::span<double> out) const
{
    for (std::size_t i = dim(); i-- > 0;) {
        out[i] = coordinate(i, index % resolution_);
        index /= resolution_;
    }
}

Point Grid::point(std::size_t index) const
{
    Point p(dim());
    point(index, p);
    return p;
}

std::vector<Point> Grid::points() const
{
    std::vector<Point> out;
    out.reserve(size_);
    for (std::size_t k = 0; k < size_; ++k) {
        out.push_back(point(k));
    }
    return out;
}

Grid grid_testset(const Box &omega, std::size_t resolution, std::size_t point_budget)
{
    return Grid(omega, resolution, point_budget);
}

std::vector<Label> oracle_labels(const ProblemSpec &spec, const Grid &grid)
{
    std::vector<Label> out(grid.size());
    Point x(grid.dim());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid.point(k, x);
        out[k] = membership(spec, x);
    }
    return out;
}

const std::vector<Label> &OracleGridCache::labels(const ProblemSpec &spec, const Grid &grid)
{
    const auto key = std::make_pair(spec.name, grid.resolution());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, oracle_labels(spec, grid)).first;
    }
    return it->second;
}

std::size_t OracleGridCache::verify(const ProblemSpec &spec, const Grid &grid, std::size_t samples,
                                    std::uint64_t seed)
{
    const auto &cached = labels(spec, grid);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::size_t mismatches = 0;
    Point x(grid.dim());
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t k = pick(rng);
        grid.point(k, x);
        mismatches += membership(spec, x) != cached[k];
    }
    return mismatches;
}

std::vector<Label> predict_grid(const SvmModel &model, const Grid &grid)
{
    if (model.dim() != grid.dim()) {
        throw std::invalid_argument("predict_grid: model and grid dimensions differ");
    }
    const std::size_t d = grid.dim();
    const std::size_t res = grid.resolution();

    // The trailing `tail` dimensions form a contiguous block of res^tail values.
    std::size_t tail = 1;
    std::size_t tail_size = res;
    while (tail < d && tail_size < 512) {
        ++tail;
        tail_size *= res;
    }
    const std::size_t lead = d - tail;
    const std::size_t lead_cells = grid.size() / tail_size;

    std::vector<std::vector<double>> coords(d, std::vector<double>(res));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < res; ++j) {
            coords[i][j] = grid.coordinate(i, j);
        }
    }

    const double c = 1.0 / (2.0 * model.gamma() * model.gamma());
    std::vector<double> acc(grid.size(), model.bias());
    std::vector<std::vector<double>> factor(d, std::vector<double>(res));
    std::vector<double> tail_table(tail_size);
    std::vector<double> scratch(tail_size);
    std::vector<std::size_t> idx(lead, 0);

    for (std::size_t k = 0; k < model.size(); ++k) {
        const auto sv = model.support_span(k);
        const double w = model.coefficients()[k] * sign(model.support_labels()[k]);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < res; ++j) {
                const double diff = coords[i][j] - sv[i];
                factor[i][j] = std::exp(-diff * diff * c);
            }
        }
        // Tensor product of the trailing factors, last dimension fastest.
        std::size_t len = 1;
        tail_table[0] = 1.0;
        for (std::size_t i = lead; i < d; ++i) {
            for (std::size_t a = 0; a < len; ++a) {
                for (std::size_t j = 0; j < res; ++j) {
                    scratch[a * res + j] = tail_table[a] * factor[i][j];
                }
            }
            len *= res;
            std::copy_n(scratch.begin(), len, tail_table.begin());
        }

        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t cell = 0; cell < lead_cells; ++cell) {
            double prefix = w;
            for (std::size_t i = 0; i < lead; ++i) {
                prefix *= factor[i][idx[i]];
            }
            if (prefix != 0.0) {
                double *out = acc.data() + cell * tail_size;
                for (std::size_t t = 0; t < tail_size; ++t) {
                    out[t] += prefix * tail_table[t];
                }
            }
            for (std::size_t i = lead; i-- > 0;) {
                if (++idx[i] < res) {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    std::vector<Label> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = label_of(acc[k] >= 0.0);
    }
    return out;
}

std::vector<Label> classify_grid(const Subpaving &sp, const Grid &grid)
{
    const SubpavingIndex index(sp);
    std::vector<Label> out(grid.size());
    Point x(grid.dim());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid.point(k, x);
        out[k] = index.classify(x);
    }
    return out;
}

double mean_prediction_us(const PointClassifier &classify, const Grid &grid, std::size_t calls)
{
    if (calls == 0) {
        return 0.0;
    }
    // Deterministic spread of grid points.
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::vector<Point> pts;
    pts.reserve(calls);
    for (std::size_t s = 0; s < calls; ++s) {
        pts.push_back(grid.point(pick(rng)));
    }
    int sink = 0;
    for (const auto &p : pts) {
        sink += static_cast<int>(classify(p));
    }
    const auto t0 = Clock::now();
    for (const auto &p : pts) {
        sink += static_cast<int>(classify(p));
    }
    const double us = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
    g_sink = sink;
    return us / static_cast<double>(calls);
}

double accuracy_of(std::span<const Label> predicted, std::span<const Label> truth)
{
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("accuracy needs equally sized, non-empty label sets");
    }
    std::size_t correct = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        correct += predicted[k] == truth[k];
    }
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

namespace {

AccuracyResult score(std::span<const Label> predicted, std::span<const Label> truth)
{
    AccuracyResult r;
    r.points = truth.size();
    for (std::size_t k = 0; k < truth.size(); ++k) {
        r.correct += predicted[k] == truth[k];
    }
    r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.points);
    return r;
}

const std::vector<Label> &truth_for(const ProblemSpec &spec, const Grid &grid, OracleGridCache *cache,
                                    std::vector<Label> &local)
{
    if (cache != nullptr) {
        return cache->labels(spec, grid);
    }
    local = oracle_labels(spec, grid);
    return local;
}

} // namespace

AccuracyResult evaluate_accuracy(const PointClassifier &classify, const ProblemSpec &spec, const Grid &grid,
                                 std::size_t timing_calls)
{
    std::vector<Label> predicted(grid.size());
    Point x(grid.dim());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid.point(k, x);
        predicted[k] = classify(x);
    }
    AccuracyResult r = score(predicted, oracle_labels(spec, grid));
    r.mean_predict_us = mean_prediction_us(classify, grid, timing_calls);
    return r;
}

AccuracyResult evaluate_accuracy(const SvmModel &model, const ProblemSpec &spec, const Grid &grid,
                                 OracleGridCache *cache, std::size_t timing_calls)
{
    std::vector<Label> local;
    const auto &truth = truth_for(spec, grid, cache, local);
    AccuracyResult r = score(predict_grid(model, grid), truth);
    r.mean_predict_us =
        mean_prediction_us([&](std::span<const double> x) { return predict(model, x); }, grid, timing_calls);
    return r;
}

AccuracyResult evaluate_accuracy(const Subpaving &sp, const ProblemSpec &spec, const Grid &grid,
                                 OracleGridCache *cache, std::size_t timing_calls)
{
    std::vector<Label> local;
    const auto &truth = truth_for(spec, grid, cache, local);
    AccuracyResult r = score(classify_grid(sp, grid), truth);
    r.mean_predict_us =
        mean_prediction_us([&](std::span<const double> x) { return subpaving_classify(sp, x); }, grid, timing_calls);
    return r;
}

std::size_t default_resolution(const std::string &problem)
{
    static const std::map<std::string, std::size_t> table = {
        {"circle", 601},   {"ring", 601},     {"doughnut", 601}, {"sphere-3d", 151},      {"sphere-4d", 41},
        {"sphere-5d", 31}, {"sphere-6d", 18}, {"sphere-7d", 12}, {"sphere-8d", 9}, {"lotka-volterra", 301}};
    const auto it = table.find(problem);
    return it == table.end() ? 101 : it->second;
}

std::pair<std::size_t, std::size_t> default_sample_counts(const std::string &problem)
{
    if (problem == "lotka-volterra") {
        return {400, 800};
    }
    return {100, 500};
}

SuiteConfig suite_from_json(const nlohmann::json &j)
{
    SuiteConfig cfg;
    try {
        if (j.contains("seeds")) {
            cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        }
        if (j.contains("oasis")) {
            cfg.oasis = j.at("oasis").get<OasisConfig>();
        }
        cfg.box_budget = j.value("box_budget", cfg.box_budget);
        cfg.grid_budget = j.value("grid_budget", cfg.grid_budget);
        cfg.timing_calls = j.value("timing_calls", cfg.timing_calls);
        for (const auto &p : j.value("problems", nlohmann::json::array())) {
            ProblemEntry e;
            if (p.is_string()) {
                e.problem = p;
            } else {
                e.problem = p.contains("problem") ? p.at("problem") : p;
                if (p.contains("methods")) {
                    const auto methods = p.at("methods").get<std::vector<std::string>>();
                    e.run_oasis = std::find(methods.begin(), methods.end(), "oasis") != methods.end();
                    e.run_sivia = std::find(methods.begin(), methods.end(), "sivia") != methods.end();
                }
                if (p.contains("resolution")) {
                    e.resolution = p.at("resolution").get<std::size_t>();
                }
                if (p.contains("n_init")) {
                    e.n_init = p.at("n_init").get<std::size_t>();
                }
                if (p.contains("n_total")) {
                    e.n_total = p.at("n_total").get<std::size_t>();
                }
                if (p.contains("epsilon")) {
                    e.epsilon = p.at("epsilon").get<double>();
                }
            }
            cfg.problems.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad suite config: ") + e.what());
    }
    return cfg;
}

const char *to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::ok:
        return "ok";
    case RowStatus::run_error:
        return "run-error";
    case RowStatus::resource_error:
        return "resource-error";
    }
    return "?";
}

BenchRow bench_oasis(const ProblemSpec &spec, const OasisConfig &config, const Grid &grid, OracleGridCache &cache,
                     std::size_t timing_calls, OasisRun *run_out)
{
    BenchRow row;
    row.problem = spec.name;
    row.method = "oasis";
    row.seed = config.seed;
    row.resolution = grid.resolution();
    OasisRun run = run_oasis(spec, config);
    const AccuracyResult acc = evaluate_accuracy(run.final_model, spec, grid, &cache, timing_calls);
    row.accuracy = acc.accuracy;
    row.predict_us = acc.mean_predict_us;
    row.training_seconds = run.training_seconds;
    row.n_samples = run.samples.size();
    for (const auto &s : run.samples) {
        row.n_active += s.origin == SampleOrigin::active;
        row.n_fallback += s.origin == SampleOrigin::fallback_random;
    }
    row.n_support = run.final_model.size();
    row.parameter = run.final_gamma;
    if (run_out != nullptr) {
        *run_out = std::move(run);
    }
    return row;
}

BenchRow bench_sivia(const ProblemSpec &spec, double epsilon, std::size_t box_budget, const Grid &grid,
                     OracleGridCache &cache, std::size_t timing_calls, Subpaving *sp_out)
{
    BenchRow row;
    row.problem = spec.name;
    row.method = "sivia";
    row.resolution = grid.resolution();
    row.parameter = epsilon;
    const auto t0 = Clock::now();
    Subpaving sp = sivia_invert(spec, epsilon, box_budget);
    row.training_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    row.n_boxes = sp.size();
    const AccuracyResult acc = evaluate_accuracy(sp, spec, grid, &cache, timing_calls);
    row.accuracy = acc.accuracy;
    row.predict_us = acc.mean_predict_us;
    const SubpavingIndex index(sp);
    row.predict_us_indexed =
        mean_prediction_us([&](std::span<const double> x) { return index.classify(x); }, grid, timing_calls);
    if (sp_out != nullptr) {
        *sp_out = std::move(sp);
    }
    return row;
}

BenchReport run_benchmark(const SuiteConfig &config, const ProgressFn &progress)
{
    BenchReport report;
    OracleGridCache cache;
    auto emit = [&](BenchRow row) {
        if (progress) {
            progress(row);
        }
        report.rows.push_back(std::move(row));
    };
    for (const auto &entry : config.problems) {
        std::string label = entry.problem.is_string() ? entry.problem.get<std::string>() : entry.problem.dump();
        auto failure = [&](const std::string &method, RowStatus status, const std::string &msg,
                           std::uint64_t seed) {
            BenchRow row;
            row.problem = label;
            row.method = method;
            row.seed = seed;
            row.status = status;
            row.message = msg;
            emit(std::move(row));
        };
        std::optional<ProblemSpec> spec;
        std::optional<Grid> grid;
        try {
            spec = problem_from_json(entry.problem);
            label = spec->name;
            grid.emplace(spec->state_space, entry.resolution.value_or(default_resolution(spec->name)),
                         config.grid_budget);
        } catch (const ResourceError &e) {
            failure("setup", RowStatus::resource_error, e.what(), 0);
            continue;
        } catch (const std::exception &e) {
            failure("setup", RowStatus::run_error, e.what(), 0);
            continue;
        }

        if (entry.run_oasis) {
            const auto [n_init, n_total] = default_sample_counts(spec->name);
            for (const auto seed : config.seeds) {
                OasisConfig oc = config.oasis;
                oc.seed = seed;
                oc.n_init = entry.n_init.value_or(n_init);
                oc.n_total = entry.n_total.value_or(n_total);
                try {
                    emit(bench_oasis(*spec, oc, *grid, cache, config.timing_calls));
                } catch (const ResourceError &e) {
                    failure("oasis", RowStatus::resource_error, e.what(), seed);
                } catch (const std::exception &e) {
                    failure("oasis", RowStatus::run_error, e.what(), seed);
                }
            }
        }
        if (entry.run_sivia && has_inclusion(spec->forward)) {
            const double eps = entry.epsilon.value_or(default_sivia_epsilon(*spec));
            try {
                emit(bench_sivia(*spec, eps, config.box_budget, *grid, cache, config.timing_calls));
            } catch (const ResourceError &e) {
                failure("sivia", RowStatus::resource_error, e.what(), 0);
            } catch (const std::exception &e) {
                failure("sivia", RowStatus::run_error, e.what(), 0);
            }
        }
    }
    return report;
}

std::vector<SummaryRow> BenchReport::summary() const
{
    std::vector<SummaryRow> out;
    for (const auto &row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow &s) {
            return s.problem == row.problem && s.method == row.method;
        });
        if (it == out.end()) {
            out.push_back({row.problem, row.method});
            it = out.end() - 1;
        }
        ++it->runs;
    }
    for (auto &s : out) {
        std::vector<const BenchRow *> ok;
        for (const auto &row : rows) {
            if (row.problem == s.problem && row.method == s.method && row.status == RowStatus::ok) {
                ok.push_back(&row);
            }
        }
        s.failures = s.runs - ok.size();
        if (ok.empty()) {
            continue;
        }
        const double n = static_cast<double>(ok.size());
        for (const auto *r : ok) {
            s.accuracy_mean += r->accuracy / n;
            s.training_seconds_mean += r->training_seconds / n;
            s.predict_us_mean += r->predict_us / n;
        }
        double var = 0.0;
        for (const auto *r : ok) {
            var += (r->accuracy - s.accuracy_mean) * (r->accuracy - s.accuracy_mean);
        }
        s.accuracy_std = ok.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    }
    return out;
}

namespace {

std::string csv_escape(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

void write_report_csv(std::ostream &os, const BenchReport &report)
{
    os << "problem,method,seed,status,accuracy,training_s,predict_us,predict_us_indexed,resolution,n_samples,"
          "n_active,n_fallback,n_support,parameter,n_boxes,message\n";
    os << std::setprecision(10);
    for (const auto &r : report.rows) {
        os << csv_escape(r.problem) << ',' << r.method << ',' << r.seed << ',' << to_string(r.status) << ','
           << r.accuracy << ',' << r.training_seconds << ',' << r.predict_us << ',' << r.predict_us_indexed << ','
           << r.resolution << ',' << r.n_samples << ',' << r.n_active << ',' << r.n_fallback << ',' << r.n_support
           << ',' << r.parameter << ',' << r.n_boxes << ',' << csv_escape(r.message) << '\n';
    }
}

void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &summary)
{
    os << "problem,method,runs,failures,accuracy_mean,accuracy_std,training_s_mean,predict_us_mean\n";
    os << std::setprecision(10);
    for (const auto &s : summary) {
        os << csv_escape(s.problem) << ',' << s.method << ',' << s.runs << ',' << s.failures << ','
           << s.accuracy_mean << ',' << s.accuracy_std << ',' << s.training_seconds_mean << ','
           << s.predict_us_mean << '\n';
    }
}

void print_summary_table(std::ostream &os, const std::vector<SummaryRow> &summary)
{
    os << std::left << std::setw(16) << "problem" << std::setw(8) << "method" << std::setw(8) << "runs"
       << std::setw(22) << "accuracy (mean+-sd)" << std::setw(14) << "train s" << "predict us\n";
    for (const auto &s : summary) {
        std::ostringstream acc;
        if (s.failures == s.runs) {
            acc << "-";
        } else {
            acc << std::fixed << std::setprecision(2) << 100.0 * s.accuracy_mean << "% +- " << std::setprecision(2)
                << 100.0 * s.accuracy_std;
        }
        std::ostringstream runs;
        runs << (s.runs - s.failures) << '/' << s.runs;
        os << std::left << std::setw(16) << s.problem << std::setw(8) << s.method << std::setw(8) << runs.str()
           << std::setw(22) << acc.str() << std::setw(14) << std::setprecision(4) << s.training_seconds_mean
           << s.predict_us_mean << '\n';
    }
}

} // namespace setinv
