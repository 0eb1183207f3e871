#ifndef SETINV_GEOMETRY_HPP
#define SETINV_GEOMETRY_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

namespace setinv {

using Point = std::vector<double>;

// Closed real interval [lo, hi]. Endpoint arithmetic uses plain floating
// point (no outward rounding).
class Interval {
public:
    Interval() = default;
    explicit Interval(double v) : lo_(v), hi_(v) {}
    Interval(double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    double center() const { return 0.5 * (lo_ + hi_); }
    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval &other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
    bool intersects(const Interval &other) const { return lo_ <= other.hi_ && other.lo_ <= hi_; }

    friend bool operator==(const Interval &, const Interval &) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval operator+(const Interval &a, const Interval &b);
Interval operator*(const Interval &a, const Interval &b);

// Exact range of x^2 over a, tighter than a * a when 0 is interior.
Interval sq(const Interval &a);

class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> dims);
    Box(std::initializer_list<Interval> dims) : Box(std::vector<Interval>(dims)) {}

    // Cube [lo, hi]^n.
    static Box cube(std::size_t n, double lo, double hi);

    std::size_t dim() const { return dims_.size(); }
    const Interval &operator[](std::size_t i) const { return dims_[i]; }
    const std::vector<Interval> &intervals() const { return dims_; }

    // Largest component width.
    double width() const;
    double volume() const;
    double diameter() const;
    Point center() const;

    // Closed containment; throws std::invalid_argument on dimension mismatch.
    bool contains(std::span<const double> x) const;
    bool contains(const Box &other) const;
    bool intersects(const Box &other) const;

    // Splits at the midpoint of the widest component (lowest index on ties).
    std::pair<Box, Box> bisect() const;

    // Componentwise clamp of x into the box.
    Point clamp(std::span<const double> x) const;

    friend bool operator==(const Box &, const Box &) = default;

private:
    std::vector<Interval> dims_;
};

// JSON form: array of [lo, hi] pairs.
void to_json(nlohmann::json &j, const Box &b);
void from_json(const nlohmann::json &j, Box &b);

enum class BoxClass { inner, uncertain, outer };

const char *to_string(BoxClass c);

// Result of an interval set inversion: inner boxes lie in the pre-image,
// outer boxes lie outside it, uncertain boxes are undecided at width <= epsilon.
struct Subpaving {
    Box search_box;
    std::vector<Box> inner;
    std::vector<Box> uncertain;
    std::vector<Box> outer;
    double epsilon = 0.0;

    std::size_t size() const { return inner.size() + uncertain.size() + outer.size(); }
    const std::vector<Box> &boxes(BoxClass c) const;
};

} // namespace setinv

#endif
