#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "setinv/active_sampler.hpp"
#include "setinv/bench.hpp"
#include "setinv/errors.hpp"
#include "setinv/forward_models.hpp"
#include "setinv/plots.hpp"
#include "setinv/sivia.hpp"

namespace fs = std::filesystem;
using namespace setinv;

namespace {

enum Exit { ok = 0, config_error = 1, run_error = 2, resource_error = 3 };

struct Options {
    std::string config;
    std::string problem;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_init;
    std::optional<std::size_t> n_total;
    std::optional<std::size_t> resolution;
    std::optional<double> epsilon;
    std::optional<std::size_t> box_budget;
    std::size_t timing_calls = 10000;
    bool no_eval = false;
    std::string model_path;
    std::string subpaving_path;
    std::string samples_path;
    std::vector<double> lv;
    std::vector<std::string> problems;
    std::vector<std::uint64_t> seeds;
};

nlohmann::json load_json(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::ifstream open_in(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    return in;
}

std::ofstream open_out(const fs::path &path)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    return out;
}

// Config file values, overridden by flags.
struct Context {
    nlohmann::json cfg = nlohmann::json::object();
    fs::path out_dir = ".";

    explicit Context(const Options &o)
    {
        if (!o.config.empty()) {
            cfg = load_json(o.config);
        }
        if (!o.problem.empty()) {
            cfg["problem"] = o.problem;
        }
        if (!o.out.empty()) {
            out_dir = o.out;
        } else if (cfg.contains("out_dir")) {
            out_dir = cfg.at("out_dir").get<std::string>();
        }
        fs::create_directories(out_dir);
    }

    ProblemSpec problem() const
    {
        if (!cfg.contains("problem")) {
            throw ConfigError("no problem given (use --problem or a config file)");
        }
        return problem_from_json(cfg.at("problem"));
    }

    std::size_t resolution(const Options &o, const ProblemSpec &spec) const
    {
        return o.resolution.value_or(cfg.value("resolution", default_resolution(spec.name)));
    }
};

std::string fmt(double v, int prec = 6)
{
    std::ostringstream ss;
    ss << std::setprecision(prec) << v;
    return ss.str();
}

int cmd_oasis(const Options &o)
{
    const Context ctx(o);
    const ProblemSpec spec = ctx.problem();
    OasisConfig oc = ctx.cfg.value("oasis", nlohmann::json::object()).get<OasisConfig>();
    const auto [n_init, n_total] = default_sample_counts(spec.name);
    const auto &oj = ctx.cfg.value("oasis", nlohmann::json::object());
    oc.n_init = o.n_init.value_or(oj.contains("n_init") ? oc.n_init : n_init);
    oc.n_total = o.n_total.value_or(oj.contains("n_total") ? oc.n_total : n_total);
    oc.seed = o.seed.value_or(ctx.cfg.value("seed", oc.seed));

    OasisRun run;
    try {
        run = run_oasis(spec, oc);
    } catch (const OasisError &e) {
        auto log = open_out(ctx.out_dir / "iterations.csv");
        write_iteration_log_csv(log, e.partial_log());
        throw;
    }
    {
        auto f = open_out(ctx.out_dir / "samples.csv");
        write_samples_csv(f, run.samples);
    }
    {
        auto f = open_out(ctx.out_dir / "iterations.csv");
        write_iteration_log_csv(f, run.log);
    }
    {
        auto f = open_out(ctx.out_dir / "model.json");
        f << nlohmann::json{{"problem", problem_to_json(spec)}, {"config", oc}, {"model", run.final_model}}.dump(2)
          << '\n';
    }
    std::size_t fallback = 0;
    for (const auto &s : run.samples) {
        fallback += s.origin == SampleOrigin::fallback_random;
    }
    std::cout << "problem " << spec.name << " seed " << oc.seed << " samples " << run.samples.size() << " fallback "
              << fallback << " gamma " << fmt(run.final_gamma) << " support " << run.final_model.size()
              << " train_s " << fmt(run.training_seconds, 4);
    if (!o.no_eval) {
        const Grid grid(spec.state_space, ctx.resolution(o, spec));
        const AccuracyResult acc = evaluate_accuracy(run.final_model, spec, grid, nullptr, o.timing_calls);
        std::cout << " resolution " << grid.resolution() << " accuracy " << fmt(acc.accuracy) << " predict_us "
                  << fmt(acc.mean_predict_us, 4);
    }
    std::cout << '\n';
    return ok;
}

int cmd_sivia(const Options &o)
{
    const Context ctx(o);
    const ProblemSpec spec = ctx.problem();
    const auto sj = ctx.cfg.value("sivia", nlohmann::json::object());
    const double eps = o.epsilon.value_or(sj.value("epsilon", default_sivia_epsilon(spec)));
    const std::size_t budget = o.box_budget.value_or(sj.value("box_budget", kDefaultBoxBudget));
    if (!(eps > 0.0)) {
        throw ConfigError("epsilon must be positive");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Subpaving sp = sivia_invert(spec, eps, budget);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto f = open_out(ctx.out_dir / "subpaving.csv");
        write_subpaving_csv(f, sp);
    }
    std::cout << "problem " << spec.name << " epsilon " << eps << " inner " << sp.inner.size() << " uncertain "
              << sp.uncertain.size() << " outer " << sp.outer.size() << " time_s " << fmt(secs, 4);
    if (!o.no_eval) {
        const Grid grid(spec.state_space, ctx.resolution(o, spec));
        const AccuracyResult acc = evaluate_accuracy(sp, spec, grid, nullptr, o.timing_calls);
        std::cout << " resolution " << grid.resolution() << " accuracy " << fmt(acc.accuracy) << " predict_us "
                  << fmt(acc.mean_predict_us, 4);
    }
    std::cout << '\n';
    return ok;
}

SvmModel load_model(const std::string &path, std::optional<nlohmann::json> *problem = nullptr)
{
    const nlohmann::json j = load_json(path);
    try {
        if (problem != nullptr && j.contains("problem")) {
            *problem = j.at("problem");
        }
        return (j.contains("model") ? j.at("model") : j).get<SvmModel>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Subpaving load_subpaving(const std::string &path)
{
    auto in = open_in(path);
    try {
        return read_subpaving_csv(in);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

int cmd_eval(const Options &o)
{
    if (o.model_path.empty() == o.subpaving_path.empty()) {
        throw ConfigError("eval needs exactly one of --model and --subpaving");
    }
    Context ctx(o);
    std::optional<SvmModel> model;
    std::optional<Subpaving> sp;
    if (!o.model_path.empty()) {
        std::optional<nlohmann::json> stored;
        model = load_model(o.model_path, &stored);
        if (!ctx.cfg.contains("problem") && stored) {
            ctx.cfg["problem"] = *stored;
        }
    } else {
        sp = load_subpaving(o.subpaving_path);
    }
    const ProblemSpec spec = ctx.problem();
    const std::size_t dim = model ? model->dim() : sp->search_box.dim();
    if (dim != spec.input_dim()) {
        throw ConfigError("classifier dimension " + std::to_string(dim) + " does not match problem '" + spec.name +
                          "'");
    }
    const Grid grid(spec.state_space, ctx.resolution(o, spec));
    const AccuracyResult acc = model ? evaluate_accuracy(*model, spec, grid, nullptr, o.timing_calls)
                                     : evaluate_accuracy(*sp, spec, grid, nullptr, o.timing_calls);
    std::cout << "problem " << spec.name << " resolution " << grid.resolution() << " points " << acc.points
              << " accuracy " << fmt(acc.accuracy) << " predict_us " << fmt(acc.mean_predict_us, 4) << '\n';
    return ok;
}

int cmd_bench(const Options &o)
{
    const Context ctx(o);
    SuiteConfig suite = suite_from_json(ctx.cfg);
    if (!o.problems.empty()) {
        suite.problems.clear();
        for (const auto &p : o.problems) {
            ProblemEntry e;
            e.problem = p;
            suite.problems.push_back(std::move(e));
        }
    }
    if (!o.seeds.empty()) {
        suite.seeds = o.seeds;
    }
    if (o.box_budget) {
        suite.box_budget = *o.box_budget;
    }
    suite.timing_calls = o.timing_calls;
    const BenchReport report = run_benchmark(suite, [](const BenchRow &r) {
        std::cerr << r.problem << ' ' << r.method << " seed " << r.seed << ' ' << to_string(r.status);
        if (r.status == RowStatus::ok) {
            std::cerr << " accuracy " << fmt(r.accuracy) << " train_s " << fmt(r.training_seconds, 4);
        } else {
            std::cerr << ": " << r.message;
        }
        std::cerr << '\n';
    });
    {
        auto f = open_out(ctx.out_dir / "report.csv");
        write_report_csv(f, report);
    }
    const auto summary = report.summary();
    {
        auto f = open_out(ctx.out_dir / "summary.csv");
        write_summary_csv(f, summary);
    }
    print_summary_table(std::cout, summary);
    return ok;
}

int cmd_plot(const Options &o)
{
    Context ctx(o);
    int written = 0;
    auto done = [&](const fs::path &p) {
        std::cout << p.string() << '\n';
        ++written;
    };
    std::optional<SvmModel> model;
    if (!o.model_path.empty()) {
        std::optional<nlohmann::json> stored;
        model = load_model(o.model_path, &stored);
        if (!ctx.cfg.contains("problem") && stored) {
            ctx.cfg["problem"] = *stored;
        }
    }
    if (!o.samples_path.empty()) {
        auto in = open_in(o.samples_path);
        std::vector<LabeledSample> samples;
        try {
            samples = read_samples_csv(in);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(o.samples_path + ": " + e.what());
        }
        const fs::path p = ctx.out_dir / "samples.svg";
        plot_samples_svg(p, ctx.problem(), samples);
        done(p);
    }
    if (model) {
        const fs::path p = ctx.out_dir / "region.svg";
        plot_region_svg(p, ctx.problem(), *model);
        done(p);
    }
    if (!o.subpaving_path.empty()) {
        const fs::path p = ctx.out_dir / "subpaving.svg";
        plot_subpaving_svg(p, load_subpaving(o.subpaving_path));
        done(p);
    }
    if (!o.lv.empty()) {
        if (o.lv.size() != 4 && o.lv.size() != 7) {
            throw ConfigError("--lv takes p1 p2 p3 p4 [u0 v0 T]");
        }
        const LVParams p{o.lv[0], o.lv[1], o.lv[2], o.lv[3]};
        const double u0 = o.lv.size() == 7 ? o.lv[4] : 50.0;
        const double v0 = o.lv.size() == 7 ? o.lv[5] : 50.0;
        const double T = o.lv.size() == 7 ? o.lv[6] : 20.0;
        const fs::path path = ctx.out_dir / "lv_trajectory.svg";
        plot_lv_trajectory_svg(path, integrate_lv(p, u0, v0, T, 1e-2));
        done(path);
    }
    if (written == 0) {
        throw ConfigError("nothing to plot (give --samples, --model, --subpaving or --lv)");
    }
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Set inversion by active learning (OASIS) and interval bisection (SIVIA)"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App *sub) {
        sub->add_option("-c,--config", o.config, "JSON config file");
        sub->add_option("-p,--problem", o.problem, "built-in problem name");
        sub->add_option("-o,--out", o.out, "output directory");
        sub->add_option("--timing-calls", o.timing_calls, "prediction timing calls")->check(CLI::PositiveNumber);
    };
    auto eval_opts = [&](CLI::App *sub) {
        sub->add_option("-r,--resolution", o.resolution, "grid points per dimension");
        sub->add_flag("--no-eval", o.no_eval, "skip grid accuracy");
    };

    auto *oasis = app.add_subcommand("oasis", "active learning run");
    common(oasis);
    eval_opts(oasis);
    oasis->add_option("-s,--seed", o.seed);
    oasis->add_option("--n-init", o.n_init);
    oasis->add_option("--n-total", o.n_total);

    auto *sivia = app.add_subcommand("sivia", "interval set inversion");
    common(sivia);
    eval_opts(sivia);
    sivia->add_option("-e,--epsilon", o.epsilon);
    sivia->add_option("--box-budget", o.box_budget);

    auto *eval = app.add_subcommand("eval", "score a saved model or subpaving on a grid");
    common(eval);
    eval->add_option("-r,--resolution", o.resolution, "grid points per dimension");
    eval->add_option("-m,--model", o.model_path, "model JSON");
    eval->add_option("--subpaving", o.subpaving_path, "subpaving CSV");

    auto *bench = app.add_subcommand("bench", "benchmark suite");
    common(bench);
    bench->add_option("--problems", o.problems, "problem names (replaces the config list)")->delimiter(',');
    bench->add_option("--seeds", o.seeds)->delimiter(',');
    bench->add_option("--box-budget", o.box_budget);

    auto *plot = app.add_subcommand("plot", "render SVG figures");
    common(plot);
    plot->add_option("-m,--model", o.model_path, "model JSON (region plot)");
    plot->add_option("--samples", o.samples_path, "samples CSV (scatter plot)");
    plot->add_option("--subpaving", o.subpaving_path, "subpaving CSV (box plot)");
    plot->add_option("--lv", o.lv, "p1 p2 p3 p4 [u0 v0 T] (trajectory plot)")->expected(4, 7);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (*oasis) {
            return cmd_oasis(o);
        }
        if (*sivia) {
            return cmd_sivia(o);
        }
        if (*eval) {
            return cmd_eval(o);
        }
        if (*bench) {
            return cmd_bench(o);
        }
        return cmd_plot(o);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ResourceError &e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return resource_error;
    } catch (const std::exception &e) {
        std::cerr << "run error: " << e.what() << '\n';
        return run_error;
    }
}
