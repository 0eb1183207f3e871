#include "setinv/sivia.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace setinv {

double default_sivia_epsilon(const ProblemSpec &spec)
{
    const std::size_t s = spec.input_dim();
    if (s <= 2) {
        return 0.05;
    }
    return 0.1;
}

Subpaving sivia_invert(const ProblemSpec &spec, double epsilon, std::size_t box_budget)
{
    if (!has_inclusion(spec.forward)) {
        throw UnsupportedModelError("SIVIA needs an inclusion function; model '" + model_name(spec.forward) +
                                    "' has none");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("SIVIA epsilon must be positive");
    }
    Subpaving sp;
    sp.search_box = spec.state_space;
    sp.epsilon = epsilon;

    struct Pending {
        Box box;
        int depth;
    };
    std::deque<Pending> queue;
    queue.push_back({spec.state_space, 0});
    std::size_t created = 1;
    int max_depth = 0;
    while (!queue.empty()) {
        Pending item = std::move(queue.front());
        queue.pop_front();
        max_depth = std::max(max_depth, item.depth);
        const Box image = eval_inclusion(spec, item.box);
        if (spec.target.contains(image)) {
            sp.inner.push_back(std::move(item.box));
        } else if (!spec.target.intersects(image)) {
            sp.outer.push_back(std::move(item.box));
        } else if (item.box.width() <= epsilon) {
            sp.uncertain.push_back(std::move(item.box));
        } else {
            if (created + 2 > box_budget) {
                throw ResourceError("SIVIA box budget of " + std::to_string(box_budget) +
                                    " exceeded at bisection depth " + std::to_string(item.depth) + " (" +
                                    std::to_string(sp.size() + queue.size() + 1) + " boxes held)");
            }
            auto [left, right] = item.box.bisect();
            queue.push_back({std::move(left), item.depth + 1});
            queue.push_back({std::move(right), item.depth + 1});
            created += 2;
        }
    }
    return sp;
}

Label subpaving_classify(const Subpaving &sp, std::span<const double> x)
{
    for (const auto &b : sp.inner) {
        if (b.contains(x)) {
            return Label::positive;
        }
    }
    for (const auto &b : sp.uncertain) {
        if (b.contains(x)) {
            return Label::positive;
        }
    }
    for (const auto &b : sp.outer) {
        if (b.contains(x)) {
            return Label::negative;
        }
    }
    throw std::out_of_range("point is not covered by the subpaving");
}

SubpavingIndex::SubpavingIndex(const Subpaving &sp, std::size_t max_cells) : sp_(&sp)
{
    const Box &sb = sp.search_box;
    const std::size_t n = sb.dim();
    if (max_cells == 0) {
        max_cells = std::max<std::size_t>(1, 4 * sp.size());
    }
    const auto per = static_cast<std::size_t>(
        std::max(1.0, std::floor(std::pow(static_cast<double>(max_cells), 1.0 / static_cast<double>(n)))));
    per_dim_.assign(n, per);
    cell_width_.resize(n);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        cell_width_[i] = sb[i].width() / static_cast<double>(per);
        total *= per;
    }

    // Two passes: count per cell, then fill (CSR layout).
    std::vector<std::size_t> counts(total + 1, 0);
    auto for_each_cell = [&](const Box &b, auto &&fn) {
        std::vector<std::size_t> lo(n), hi(n), idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto clamp_cell = [&](double v) {
                const double c = std::floor((v - sb[i].lo()) / cell_width_[i]);
                return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(per - 1)));
            };
            lo[i] = clamp_cell(b[i].lo());
            hi[i] = clamp_cell(b[i].hi());
            idx[i] = lo[i];
        }
        while (true) {
            std::size_t flat = 0;
            for (std::size_t i = n; i-- > 0;) {
                flat = flat * per + idx[i];
            }
            fn(flat);
            std::size_t d = 0;
            while (d < n && idx[d] == hi[d]) {
                idx[d] = lo[d];
                ++d;
            }
            if (d == n) {
                break;
            }
            ++idx[d];
        }
    };
    const std::pair<const std::vector<Box> *, Label> lists[] = {
        {&sp.inner, Label::positive}, {&sp.uncertain, Label::positive}, {&sp.outer, Label::negative}};
    for (const auto &[list, label] : lists) {
        for (const auto &b : *list) {
            for_each_cell(b, [&](std::size_t c) { ++counts[c + 1]; });
        }
    }
    for (std::size_t c = 0; c < total; ++c) {
        counts[c + 1] += counts[c];
    }
    offsets_ = counts;
    entries_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto &[list, label] : lists) {
        for (const auto &b : *list) {
            for_each_cell(b, [&](std::size_t c) { entries_[fill[c]++] = {&b, label}; });
        }
    }
}

std::size_t SubpavingIndex::cell_of(std::span<const double> x) const
{
    const Box &sb = sp_->search_box;
    std::size_t flat = 0;
    for (std::size_t i = x.size(); i-- > 0;) {
        const double c = std::floor((x[i] - sb[i].lo()) / cell_width_[i]);
        const auto ci = static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(per_dim_[i] - 1)));
        flat = flat * per_dim_[i] + ci;
    }
    return flat;
}

Label SubpavingIndex::classify(std::span<const double> x) const
{
    if (x.size() != sp_->search_box.dim()) {
        throw std::invalid_argument("point dimension does not match subpaving");
    }
    const std::size_t c = cell_of(x);
    for (std::size_t k = offsets_[c]; k < offsets_[c + 1]; ++k) {
        if (entries_[k].box->contains(x)) {
            return entries_[k].label;
        }
    }
    throw std::out_of_range("point is not covered by the subpaving");
}

void write_subpaving_csv(std::ostream &os, const Subpaving &sp)
{
    const std::size_t n = sp.search_box.dim();
    os.precision(17);
    os << "# epsilon=" << sp.epsilon << '\n';
    os << "class";
    for (std::size_t i = 0; i < n; ++i) {
        os << ",lo" << i << ",hi" << i;
    }
    os << '\n';
    for (BoxClass c : {BoxClass::inner, BoxClass::uncertain, BoxClass::outer}) {
        for (const auto &b : sp.boxes(c)) {
            os << to_string(c);
            for (const auto &iv : b.intervals()) {
                os << ',' << iv.lo() << ',' << iv.hi();
            }
            os << '\n';
        }
    }
}

Subpaving read_subpaving_csv(std::istream &is)
{
    std::string line;
    double epsilon = 0.0;
    while (std::getline(is, line) && line.starts_with("#")) {
        if (const auto pos = line.find("epsilon="); pos != std::string::npos) {
            epsilon = std::stod(line.substr(pos + 8));
        }
    }
    if (line.empty()) {
        throw std::invalid_argument("empty subpaving CSV");
    }
    const auto commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (commas < 2 || commas % 2 != 0) {
        throw std::invalid_argument("subpaving CSV header must be class,lo0,hi0,...");
    }
    const std::size_t n = commas / 2;
    Subpaving sp;
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cls;
        std::getline(ss, cls, ',');
        std::vector<Interval> dims;
        for (std::size_t i = 0; i < n; ++i) {
            std::string a;
            std::string b;
            std::getline(ss, a, ',');
            std::getline(ss, b, ',');
            dims.emplace_back(std::stod(a), std::stod(b));
            lo[i] = std::min(lo[i], dims.back().lo());
            hi[i] = std::max(hi[i], dims.back().hi());
        }
        Box box(std::move(dims));
        if (cls == "inner") {
            sp.inner.push_back(std::move(box));
        } else if (cls == "uncertain") {
            sp.uncertain.push_back(std::move(box));
        } else if (cls == "outer") {
            sp.outer.push_back(std::move(box));
        } else {
            throw std::invalid_argument("unknown box class '" + cls + "'");
        }
    }
    if (sp.size() == 0) {
        throw std::invalid_argument("subpaving CSV has no boxes");
    }
    std::vector<Interval> bounds;
    for (std::size_t i = 0; i < n; ++i) {
        bounds.emplace_back(lo[i], hi[i]);
    }
    sp.search_box = Box(std::move(bounds));
    sp.epsilon = epsilon;
    return sp;
}

} // namespace setinv
