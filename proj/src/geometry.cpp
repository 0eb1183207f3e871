#include "setinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace setinv {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(lo <= hi)) {
        throw std::invalid_argument("interval requires lo <= hi, got [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    }
}

Interval operator+(const Interval &a, const Interval &b)
{
    return Interval(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator*(const Interval &a, const Interval &b)
{
    const double p1 = a.lo() * b.lo();
    const double p2 = a.lo() * b.hi();
    const double p3 = a.hi() * b.lo();
    const double p4 = a.hi() * b.hi();
    return Interval(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}

Interval sq(const Interval &a)
{
    const double l2 = a.lo() * a.lo();
    const double h2 = a.hi() * a.hi();
    if (a.contains(0.0)) {
        return Interval(0.0, std::max(l2, h2));
    }
    return Interval(std::min(l2, h2), std::max(l2, h2));
}

Box::Box(std::vector<Interval> dims) : dims_(std::move(dims))
{
    if (dims_.empty()) {
        throw std::invalid_argument("box needs at least one dimension");
    }
}

Box Box::cube(std::size_t n, double lo, double hi)
{
    return Box(std::vector<Interval>(n, Interval(lo, hi)));
}

double Box::width() const
{
    double w = 0.0;
    for (const auto &iv : dims_) {
        w = std::max(w, iv.width());
    }
    return w;
}

double Box::volume() const
{
    double v = 1.0;
    for (const auto &iv : dims_) {
        v *= iv.width();
    }
    return v;
}

double Box::diameter() const
{
    double s = 0.0;
    for (const auto &iv : dims_) {
        s += iv.width() * iv.width();
    }
    return std::sqrt(s);
}

Point Box::center() const
{
    Point c(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        c[i] = dims_[i].center();
    }
    return c;
}

bool Box::contains(std::span<const double> x) const
{
    if (x.size() != dims_.size()) {
        throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                    " does not match box dimension " + std::to_string(dims_.size()));
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(x[i])) {
            return false;
        }
    }
    return true;
}

bool Box::contains(const Box &other) const
{
    if (other.dim() != dim()) {
        throw std::invalid_argument("box dimension mismatch");
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(other.dims_[i])) {
            return false;
        }
    }
    return true;
}

bool Box::intersects(const Box &other) const
{
    if (other.dim() != dim()) {
        throw std::invalid_argument("box dimension mismatch");
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].intersects(other.dims_[i])) {
            return false;
        }
    }
    return true;
}

std::pair<Box, Box> Box::bisect() const
{
    std::size_t widest = 0;
    for (std::size_t i = 1; i < dims_.size(); ++i) {
        if (dims_[i].width() > dims_[widest].width()) {
            widest = i;
        }
    }
    const Interval &cut = dims_[widest];
    if (!(cut.width() > 0.0)) {
        throw std::invalid_argument("cannot bisect a zero-width box");
    }
    const double mid = cut.center();
    Box left = *this;
    Box right = *this;
    left.dims_[widest] = Interval(cut.lo(), mid);
    right.dims_[widest] = Interval(mid, cut.hi());
    return {std::move(left), std::move(right)};
}

Point Box::clamp(std::span<const double> x) const
{
    if (x.size() != dims_.size()) {
        throw std::invalid_argument("point dimension does not match box dimension");
    }
    Point out(x.begin(), x.end());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        out[i] = std::clamp(out[i], dims_[i].lo(), dims_[i].hi());
    }
    return out;
}

void to_json(nlohmann::json &j, const Box &b)
{
    j = nlohmann::json::array();
    for (const auto &iv : b.intervals()) {
        j.push_back({iv.lo(), iv.hi()});
    }
}

void from_json(const nlohmann::json &j, Box &b)
{
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("box must be a non-empty array of [lo, hi] pairs");
    }
    std::vector<Interval> dims;
    for (const auto &pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw std::invalid_argument("box component must be a [lo, hi] pair");
        }
        dims.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    b = Box(std::move(dims));
}

const char *to_string(BoxClass c)
{
    switch (c) {
    case BoxClass::inner:
        return "inner";
    case BoxClass::uncertain:
        return "uncertain";
    case BoxClass::outer:
        return "outer";
    }
    return "?";
}

const std::vector<Box> &Subpaving::boxes(BoxClass c) const
{
    switch (c) {
    case BoxClass::inner:
        return inner;
    case BoxClass::uncertain:
        return uncertain;
    case BoxClass::outer:
        break;
    }
    return outer;
}

} // namespace setinv
