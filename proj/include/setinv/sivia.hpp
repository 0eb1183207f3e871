#ifndef SETINV_SIVIA_HPP
#define SETINV_SIVIA_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "setinv/forward_models.hpp"
#include "setinv/geometry.hpp"

namespace setinv {

constexpr std::size_t kDefaultBoxBudget = 10'000'000;

// Default tolerance: 0.05 in 2D, 0.1 in higher dimensions.
double default_sivia_epsilon(const ProblemSpec &spec);

// Interval set inversion by breadth-first bisection of the state space.
// Boxes whose inclusion lies in the target are inner, boxes whose inclusion
// misses it are outer, and boxes of width <= epsilon that remain undecided are
// uncertain. Throws ResourceError once more than box_budget boxes have been
// created, UnsupportedModelError for models without an inclusion function.
Subpaving sivia_invert(const ProblemSpec &spec, double epsilon, std::size_t box_budget = kDefaultBoxBudget);

// Uncertain boxes count as inside. Closed containment, checked in the order
// inner, uncertain, outer. Throws std::out_of_range if no box holds x.
Label subpaving_classify(const Subpaving &sp, std::span<const double> x);

// Uniform bucket grid over the search box; each cell lists the boxes that touch
// it, in classification precedence order.
class SubpavingIndex {
public:
    explicit SubpavingIndex(const Subpaving &sp, std::size_t max_cells = 0);

    Label classify(std::span<const double> x) const;
    std::size_t cells() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

private:
    struct Entry {
        const Box *box;
        Label label;
    };

    std::size_t cell_of(std::span<const double> x) const;

    const Subpaving *sp_;
    std::vector<std::size_t> per_dim_;
    std::vector<double> cell_width_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

// One box per row: class,lo0,hi0,lo1,hi1,...
void write_subpaving_csv(std::ostream &os, const Subpaving &sp);
Subpaving read_subpaving_csv(std::istream &is);

} // namespace setinv

#endif
