#include "lrdseq/grid.hpp"

#include <algorithm>
#include <cmath>

#include "lrdseq/errors.hpp"

namespace lrdseq {

std::size_t EvaluationGrid::lattice_size() const {
    std::size_t n = 1;
    for (const auto& xs : x_points) n *= xs.size();
    return n;
}

void EvaluationGrid::validate(std::size_t lattice_cap) const {
    if (x_points.empty()) throw GridMismatch("grid: no x dimensions");
    for (const auto& xs : x_points) {
        if (xs.size() < 2 || xs.front() != -kInf || xs.back() != kInf)
            throw GridMismatch("grid: each dimension needs -inf/+inf sentinels");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i - 1] < xs[i]))
                throw GridMismatch("grid: x points must be strictly increasing");
    }
    if (t_points.size() < 2 || t_points.front() != 0.0 || t_points.back() != 1.0)
        throw GridMismatch("grid: t points must cover [0,1] including endpoints");
    for (std::size_t i = 1; i < t_points.size(); ++i)
        if (!(t_points[i - 1] < t_points[i]))
            throw GridMismatch("grid: t points must be strictly increasing");
    if (lattice_size() > lattice_cap) throw SizeCapExceeded("grid: x lattice exceeds cap");
}

std::size_t EvaluationGrid::flat_index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dims(); ++d) flat = flat * x_points[d].size() + idx[d];
    return flat;
}

std::vector<std::size_t> EvaluationGrid::index_at(std::size_t flat) const {
    std::vector<std::size_t> idx(dims());
    for (int d = dims() - 1; d >= 0; --d) {
        idx[d] = flat % x_points[d].size();
        flat /= x_points[d].size();
    }
    return idx;
}

std::vector<double> EvaluationGrid::point_at(std::size_t flat) const {
    auto idx = index_at(flat);
    std::vector<double> pt(dims());
    for (int d = 0; d < dims(); ++d) pt[d] = x_points[d][idx[d]];
    return pt;
}

std::vector<double> default_t_points(int t_count) {
    if (t_count < 2) t_count = 2;
    std::vector<double> t(t_count);
    for (int i = 0; i < t_count; ++i) t[i] = static_cast<double>(i) / (t_count - 1);
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

namespace {

// Generalized inverse of a component's output cdf by bisection.
double component_quantile(const Component& comp, double level) {
    double lo = -1e8, hi = 1e8;
    if (component_cdf(comp, lo) >= level) {
        // walk further left until the level is bracketed (bounded outputs)
        while (component_cdf(comp, lo) >= level && lo > -1e30) lo *= 10.0;
    }
    while (component_cdf(comp, hi) < level && hi < 1e30) hi *= 10.0;
    for (int it = 0; it < 240; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (component_cdf(comp, mid) >= level)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

EvaluationGrid make_default_grid(const Subordinator& G, int points_per_dim, int t_count) {
    G.validate();
    EvaluationGrid grid;
    grid.t_points = default_t_points(t_count);
    for (const auto& comp : G.components) {
        std::vector<double> pts;
        pts.push_back(-kInf);
        for (int i = 1; i <= points_per_dim; ++i) {
            const double level = static_cast<double>(i) / (points_per_dim + 1);
            pts.push_back(component_quantile(comp, level));
        }
        pts.push_back(kInf);
        std::sort(pts.begin(), pts.end());
        // atoms of F_j collapse neighbouring quantiles; sentinels always stay
        std::vector<double> dedup;
        for (double v : pts) {
            if (!dedup.empty()) {
                const double prev = dedup.back();
                if (v == prev) continue;
                if (std::isfinite(v) && std::isfinite(prev) &&
                    v <= prev + 1e-12 * (1.0 + std::abs(v)))
                    continue;
            }
            dedup.push_back(v);
        }
        grid.x_points.push_back(std::move(dedup));
    }
    grid.validate();
    return grid;
}

} // namespace lrdseq
