#ifndef SETINV_ACTIVE_SAMPLER_HPP
#define SETINV_ACTIVE_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "setinv/forward_models.hpp"
#include "setinv/optimizer.hpp"
#include "setinv/svm.hpp"

namespace setinv {

enum class SampleOrigin { random, active, fallback_random };
const char *to_string(SampleOrigin o);

struct LabeledSample {
    Point point;
    Label label = Label::negative;
    SampleOrigin origin = SampleOrigin::random;
    // 0 for the initial random draw, otherwise the 1-based active iteration.
    int iteration = 0;
};

struct OasisConfig {
    std::size_t n_init = 100;
    std::size_t n_total = 500;
    std::uint64_t seed = 1;
    // gamma0 <= 0 selects 0.1 * diameter of the state space.
    GammaSchedule schedule{0.0, 2.0, 30};
    TrainOptions train;
    ProjectionOptions projection;
    // A projected point this close to an existing sample is replaced by x0.
    double duplicate_tol = 1e-10;
};

void to_json(nlohmann::json &j, const OasisConfig &c);
void from_json(const nlohmann::json &j, OasisConfig &c);

struct IterationLog {
    int iteration = 0;
    double gamma = 0.0;
    ScanDirection direction = ScanDirection::none;
    std::size_t gamma_trials = 0;
    double residual = 0.0;
    double distance = 0.0;
    int sqp_iterations = 0;
    bool fallback = false;
    std::string fallback_reason;
    double train_ms = 0.0;
    double project_ms = 0.0;
};

struct OasisRun {
    std::vector<LabeledSample> samples;
    SvmModel final_model;
    std::vector<IterationLog> log;
    double final_gamma = 0.0;
    double training_seconds = 0.0;
};

class OasisError : public RunError {
public:
    OasisError(const std::string &what, std::vector<IterationLog> partial)
        : RunError(what), partial_log_(std::move(partial))
    {
    }
    const std::vector<IterationLog> &partial_log() const { return partial_log_; }

private:
    std::vector<IterationLog> partial_log_;
};

// n_init uniform draws from the state space with oracle labels. If only one
// label turns up, further draws continue (up to 100 * n_init in total) and the
// first draw of the missing label replaces the newest of the initial points.
std::vector<LabeledSample> sample_initial(const ProblemSpec &spec, std::size_t n_init, std::mt19937_64 &rng);

// Active learning loop: calibrate gamma and retrain, project a uniform random
// point onto the decision manifold, label the projection with the oracle,
// repeat until n_total samples. Falls back to the random point itself when the
// projection fails or duplicates an existing sample.
OasisRun run_oasis(const ProblemSpec &spec, const OasisConfig &config, std::mt19937_64 &rng);
OasisRun run_oasis(const ProblemSpec &spec, const OasisConfig &config);

void write_samples_csv(std::ostream &os, const std::vector<LabeledSample> &samples);
std::vector<LabeledSample> read_samples_csv(std::istream &is);
void write_iteration_log_csv(std::ostream &os, const std::vector<IterationLog> &log);

} // namespace setinv

#endif
