#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path &workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("setinv_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct Result {
    int code;
    std::string out;
};

Result run(const std::string &args)
{
    const fs::path log = workdir() / "stdout.txt";
    const std::string cmd = std::string("cd '") + workdir().string() + "' && '" + SETINV_CLI_PATH + "' " + args +
                            " > '" + log.string() + "' 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

void write(const std::string &name, const std::string &text)
{
    std::ofstream(workdir() / name) << text;
}

bool nonempty(const fs::path &p)
{
    return fs::exists(p) && fs::file_size(p) > 0;
}

} // namespace

TEST_CASE("oasis writes artifacts and eval reproduces the accuracy")
{
    const Result r = run("oasis -p circle --n-init 30 --n-total 60 -r 101 -o run1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("accuracy") != std::string::npos);
    for (const char *f : {"samples.csv", "iterations.csv", "model.json"}) {
        CHECK(nonempty(workdir() / "run1" / f));
    }
    const auto acc = r.out.substr(r.out.find("accuracy") + 9);
    const Result e = run("eval -m run1/model.json -r 101");
    REQUIRE(e.code == 0);
    CHECK(e.out.find("accuracy " + acc.substr(0, acc.find(' '))) != std::string::npos);
}

TEST_CASE("sivia, eval and plot")
{
    REQUIRE(run("sivia -p doughnut -e 0.1 --no-eval -o sv").code == 0);
    CHECK(nonempty(workdir() / "sv" / "subpaving.csv"));
    CHECK(run("eval --subpaving sv/subpaving.csv -p doughnut -r 51").code == 0);
    // Missing problem for a subpaving.
    CHECK(run("eval --subpaving sv/subpaving.csv").code == 1);

    REQUIRE(run("oasis -p ring --n-init 20 --n-total 30 --no-eval -o r").code == 0);
    const Result p = run("plot -m r/model.json --samples r/samples.csv --subpaving sv/subpaving.csv "
                         "--lv 1 0.02 1.5 0.02 -o figs");
    REQUIRE(p.code == 0);
    for (const char *f : {"samples.svg", "region.svg", "subpaving.svg", "lv_trajectory.svg"}) {
        CHECK(nonempty(workdir() / "figs" / f));
    }
}

TEST_CASE("config file with inline problem")
{
    write("inline.json", R"({
        "problem": {"name": "disk", "model": "circle", "target": [[0, 1]], "state_space": [[-2, 2], [-2, 2]]},
        "oasis": {"n_init": 20, "n_total": 25},
        "resolution": 41,
        "out_dir": "inline"
    })");
    const Result r = run("oasis -c inline.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("problem disk") != std::string::npos);
    CHECK(r.out.find("samples 25") != std::string::npos);
}

TEST_CASE("bench: empty suite and small suite")
{
    write("empty.json", "{}");
    CHECK(run("bench -c empty.json -o empty").code == 0);
    CHECK(nonempty(workdir() / "empty" / "report.csv"));

    write("suite.json", R"({
        "seeds": [1, 2],
        "timing_calls": 100,
        "problems": [{"problem": "circle", "resolution": 41, "n_init": 20, "n_total": 30}]
    })");
    REQUIRE(run("bench -c suite.json -o suite --timing-calls 100").code == 0);
    std::ifstream in(workdir() / "suite" / "report.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("exit codes")
{
    CHECK(run("").code == 1);
    CHECK(run("oasis --bogus").code == 1);
    CHECK(run("oasis -p nope").code == 1);
    CHECK(run("oasis -c missing.json").code == 1);
    write("bad.json", "{not json");
    CHECK(run("oasis -c bad.json").code == 1);
    CHECK(run("oasis -p circle --n-init 10 --n-total 5").code == 1);
    CHECK(run("plot -p circle").code == 1);
    CHECK(run("sivia -p lotka-volterra --no-eval").code == 2);
    CHECK(run("oasis -p circle --n-init 1 --n-total 1 --no-eval").code == 2);
    CHECK(run("sivia -p circle -e 0.001 --box-budget 1000 --no-eval").code == 3);
    CHECK(run("oasis -p circle --n-init 10 --n-total 10 -r 20000").code == 3);
}
