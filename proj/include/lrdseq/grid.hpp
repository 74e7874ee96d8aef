#pragma once

#include <cstddef>
#include <vector>

#include "lrdseq/subordinator.hpp"

namespace lrdseq {

// The finite (x, t) lattice on which surfaces and statistics are
// evaluated. Each x dimension carries -inf and +inf sentinels; t covers
// [0, 1] including both endpoints.
struct EvaluationGrid {
    std::vector<std::vector<double>> x_points; // per output dimension, ascending
    std::vector<double> t_points;              // ascending, 0 and 1 included

    int dims() const { return static_cast<int>(x_points.size()); }
    std::size_t lattice_size() const;
    void validate(std::size_t lattice_cap = 1000000) const;

    // Row-major flat index over the x lattice.
    std::size_t flat_index(std::span<const std::size_t> idx) const;
    std::vector<double> point_at(std::size_t flat) const;
    std::vector<std::size_t> index_at(std::size_t flat) const;
};

// Quantile-spaced default grid: per output dimension j, `points_per_dim`
// interior points at levels i/(points_per_dim+1) of F_j, deduplicated
// (atoms of F_j collapse several levels onto one point), plus sentinels.
EvaluationGrid make_default_grid(const Subordinator& G, int points_per_dim = 33,
                                 int t_count = 11);

std::vector<double> default_t_points(int t_count);

} // namespace lrdseq
