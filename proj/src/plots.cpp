#include "setinv/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace setinv {

namespace {

constexpr double kSize = 600.0;
constexpr double kMargin = 40.0;

// Maps data coordinates of a 2-D box onto an SVG canvas (y axis up).
class Canvas {
public:
    Canvas(const Box &box, double width = kSize, double height = kSize)
        : box_(box), width_(width), height_(height)
    {
        svg_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * kMargin << "\" height=\""
             << height + 2 * kMargin << "\">\n";
        svg_ << "<rect x=\"0\" y=\"0\" width=\"" << width + 2 * kMargin << "\" height=\"" << height + 2 * kMargin
             << "\" fill=\"white\"/>\n";
    }

    double sx(double x) const { return kMargin + (x - box_[0].lo()) / box_[0].width() * width_; }
    double sy(double y) const { return kMargin + (box_[1].hi() - y) / box_[1].width() * height_; }

    void rect(double x0, double y0, double x1, double y1, const std::string &fill, const std::string &stroke = "none",
              double opacity = 1.0)
    {
        svg_ << "<rect x=\"" << sx(x0) << "\" y=\"" << sy(y1) << "\" width=\"" << sx(x1) - sx(x0) << "\" height=\""
             << sy(y0) - sy(y1) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
             << "\" stroke-width=\"0.3\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string &fill, const std::string &stroke)
    {
        svg_ << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"" << r << "\" fill=\"" << fill
             << "\" stroke=\"" << stroke << "\" stroke-width=\"0.8\"/>\n";
    }

    void segments(const std::vector<Segment> &segs, const std::string &color, double width)
    {
        if (segs.empty()) {
            return;
        }
        svg_ << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\" d=\"";
        for (const auto &s : segs) {
            svg_ << 'M' << sx(s.a[0]) << ',' << sy(s.a[1]) << 'L' << sx(s.b[0]) << ',' << sy(s.b[1]);
        }
        svg_ << "\"/>\n";
    }

    void polyline(const std::vector<double> &xs, const std::vector<double> &ys, const std::string &color)
    {
        svg_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            svg_ << sx(xs[i]) << ',' << sy(ys[i]) << ' ';
        }
        svg_ << "\"/>\n";
    }

    void text(double px, double py, const std::string &s, const std::string &anchor = "start")
    {
        svg_ << "<text x=\"" << px << "\" y=\"" << py << "\" font-family=\"sans-serif\" font-size=\"12\" "
             << "text-anchor=\"" << anchor << "\">" << s << "</text>\n";
    }

    void frame()
    {
        svg_ << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << width_ << "\" height=\""
             << height_ << "\" fill=\"none\" stroke=\"black\"/>\n";
        std::ostringstream lo0, hi0, lo1, hi1;
        lo0 << box_[0].lo();
        hi0 << box_[0].hi();
        lo1 << box_[1].lo();
        hi1 << box_[1].hi();
        text(kMargin, kMargin + height_ + 16, lo0.str(), "middle");
        text(kMargin + width_, kMargin + height_ + 16, hi0.str(), "middle");
        text(kMargin - 4, kMargin + height_, lo1.str(), "end");
        text(kMargin - 4, kMargin + 4, hi1.str(), "end");
    }

    void save(const std::filesystem::path &path)
    {
        svg_ << "</svg>\n";
        if (path.has_parent_path()) {
            std::filesystem::create_directories(path.parent_path());
        }
        std::ofstream out(path);
        if (!out) {
            throw RunError("cannot write " + path.string());
        }
        out << svg_.str();
    }

private:
    Box box_;
    double width_;
    double height_;
    std::ostringstream svg_;
};

void require_2d(const Box &box, const char *what)
{
    if (box.dim() != 2) {
        throw ConfigError(std::string(what) + " needs a 2-D state space, got " + std::to_string(box.dim()) + "-D");
    }
}

} // namespace

std::vector<Segment> zero_contour(const std::function<double(double, double)> &f, const Box &box,
                                  std::size_t resolution)
{
    require_2d(box, "zero_contour");
    if (resolution < 2) {
        throw std::invalid_argument("zero_contour needs resolution >= 2");
    }
    const std::size_t n = resolution;
    const double hx = box[0].width() / static_cast<double>(n - 1);
    const double hy = box[1].width() / static_cast<double>(n - 1);
    auto xc = [&](std::size_t i) { return box[0].lo() + hx * static_cast<double>(i); };
    auto yc = [&](std::size_t j) { return box[1].lo() + hy * static_cast<double>(j); };

    std::vector<double> v(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            v[j * n + i] = f(xc(i), yc(j));
        }
    }

    std::vector<Segment> out;
    using P = std::array<double, 2>;
    auto lerp = [](const P &a, const P &b, double fa, double fb) {
        const double t = fa / (fa - fb);
        return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    };
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            // Corners counter-clockwise from bottom-left.
            const P c[4] = {{xc(i), yc(j)}, {xc(i + 1), yc(j)}, {xc(i + 1), yc(j + 1)}, {xc(i), yc(j + 1)}};
            const double fv[4] = {v[j * n + i], v[j * n + i + 1], v[(j + 1) * n + i + 1], v[(j + 1) * n + i]};
            int mask = 0;
            for (int k = 0; k < 4; ++k) {
                mask |= (fv[k] >= 0.0 ? 1 : 0) << k;
            }
            if (mask == 0 || mask == 15) {
                continue;
            }
            // Crossing point on edge k (between corner k and k+1).
            P e[4];
            bool has[4] = {false, false, false, false};
            for (int k = 0; k < 4; ++k) {
                const int k1 = (k + 1) % 4;
                if ((fv[k] >= 0.0) != (fv[k1] >= 0.0)) {
                    e[k] = lerp(c[k], c[k1], fv[k], fv[k1]);
                    has[k] = true;
                }
            }
            std::vector<int> edges;
            for (int k = 0; k < 4; ++k) {
                if (has[k]) {
                    edges.push_back(k);
                }
            }
            if (edges.size() == 2) {
                out.push_back({e[edges[0]], e[edges[1]]});
            } else if (edges.size() == 4) {
                const double center = f(0.5 * (c[0][0] + c[1][0]), 0.5 * (c[0][1] + c[3][1]));
                // Connect edges around the corners whose sign differs from the center.
                if ((center >= 0.0) == (fv[0] >= 0.0)) {
                    out.push_back({e[0], e[1]});
                    out.push_back({e[2], e[3]});
                } else {
                    out.push_back({e[3], e[0]});
                    out.push_back({e[1], e[2]});
                }
            }
        }
    }
    return out;
}

void plot_samples_svg(const std::filesystem::path &path, const ProblemSpec &spec,
                      const std::vector<LabeledSample> &samples)
{
    require_2d(spec.state_space, "sample scatter plot");
    Canvas cv(spec.state_space);
    cv.segments(zero_contour(
                    [&](double x, double y) {
                        const Point p{x, y};
                        return membership(spec, p) == Label::positive ? 1.0 : -1.0;
                    },
                    spec.state_space, 301),
                "#888888", 1.0);
    for (const auto &s : samples) {
        const std::string fill = s.label == Label::positive ? "#d62728" : "#1f77b4";
        const std::string stroke = s.origin == SampleOrigin::active ? "black" : "none";
        const double r = s.origin == SampleOrigin::random ? 2.0 : 2.8;
        cv.circle(s.point[0], s.point[1], r, fill, stroke);
    }
    cv.frame();
    cv.text(kMargin, 24, spec.name + ": samples (red +1, blue -1, outlined = active)");
    cv.save(path);
}

void plot_region_svg(const std::filesystem::path &path, const ProblemSpec &spec, const SvmModel &model,
                     std::size_t resolution)
{
    require_2d(spec.state_space, "region plot");
    const Box &box = spec.state_space;
    Canvas cv(box);
    const double hx = box[0].width() / static_cast<double>(resolution);
    const double hy = box[1].width() / static_cast<double>(resolution);
    for (std::size_t j = 0; j < resolution; ++j) {
        for (std::size_t i = 0; i < resolution; ++i) {
            const double x0 = box[0].lo() + hx * static_cast<double>(i);
            const double y0 = box[1].lo() + hy * static_cast<double>(j);
            const Point c{x0 + 0.5 * hx, y0 + 0.5 * hy};
            if (predict(model, c) == Label::positive) {
                cv.rect(x0, y0, x0 + hx, y0 + hy, "#f4a582");
            }
        }
    }
    cv.segments(zero_contour(
                    [&](double x, double y) {
                        const Point p{x, y};
                        return membership(spec, p) == Label::positive ? 1.0 : -1.0;
                    },
                    box, 401),
                "black", 1.2);
    cv.segments(zero_contour([&](double x, double y) { return decision_value(model, Point{x, y}); }, box, 201),
                "#b2182b", 1.5);
    cv.frame();
    cv.text(kMargin, 24, spec.name + ": predicted region (shaded), SVM boundary (red), ground truth (black)");
    cv.save(path);
}

void plot_subpaving_svg(const std::filesystem::path &path, const Subpaving &sp)
{
    require_2d(sp.search_box, "subpaving plot");
    Canvas cv(sp.search_box);
    const std::pair<BoxClass, const char *> styles[] = {
        {BoxClass::outer, "#4575b4"}, {BoxClass::inner, "#d73027"}, {BoxClass::uncertain, "#fee090"}};
    for (const auto &[cls, color] : styles) {
        for (const auto &b : sp.boxes(cls)) {
            cv.rect(b[0].lo(), b[1].lo(), b[0].hi(), b[1].hi(), color, "black");
        }
    }
    cv.frame();
    std::ostringstream title;
    title << "subpaving eps=" << sp.epsilon << ": inner (red), uncertain (yellow), outer (blue)";
    cv.text(kMargin, 24, title.str());
    cv.save(path);
}

void plot_lv_trajectory_svg(const std::filesystem::path &path, const LVTrajectory &traj)
{
    if (traj.t.size() < 2) {
        throw ConfigError("trajectory plot needs a stored trajectory");
    }
    const double umax = *std::max_element(traj.u.begin(), traj.u.end());
    const double vmax = *std::max_element(traj.v.begin(), traj.v.end());
    const Box frame{Interval(traj.t.front(), traj.t.back()), Interval(0.0, 1.05 * std::max(umax, vmax))};
    Canvas cv(frame, 800.0, 400.0);
    cv.polyline(traj.t, traj.u, "#1a9850");
    cv.polyline(traj.t, traj.v, "#d73027");
    cv.frame();
    cv.text(kMargin, 24, "Lotka-Volterra: prey u (green), predator v (red)");
    cv.save(path);
}

} // namespace setinv
