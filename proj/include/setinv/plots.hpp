#ifndef SETINV_PLOTS_HPP
#define SETINV_PLOTS_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "setinv/active_sampler.hpp"
#include "setinv/forward_models.hpp"
#include "setinv/geometry.hpp"
#include "setinv/svm.hpp"

namespace setinv {

struct Segment {
    std::array<double, 2> a;
    std::array<double, 2> b;
};

// Zero level set of f on a resolution x resolution vertex grid over a 2-D box,
// by marching squares with linear interpolation along cell edges. Saddle cells
// are split using the cell-center value.
std::vector<Segment> zero_contour(const std::function<double(double, double)> &f, const Box &box,
                                  std::size_t resolution);

// All region plots require a 2-D state space and throw ConfigError otherwise.
void plot_samples_svg(const std::filesystem::path &path, const ProblemSpec &spec,
                      const std::vector<LabeledSample> &samples);
void plot_region_svg(const std::filesystem::path &path, const ProblemSpec &spec, const SvmModel &model,
                     std::size_t resolution = 150);
void plot_subpaving_svg(const std::filesystem::path &path, const Subpaving &sp);
void plot_lv_trajectory_svg(const std::filesystem::path &path, const LVTrajectory &traj);

} // namespace setinv

#endif
