#include "lrdseq/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/normal.hpp"
#include "lrdseq/quadrature.hpp"

namespace lrdseq {

namespace {

QuadratureOptions to_options(const QuadSpec& quad) {
    QuadratureOptions opts;
    opts.abs_tol = quad.abs_tol;
    opts.rel_tol = quad.rel_tol;
    opts.max_panels = quad.max_panels;
    return opts;
}

void check_dims(const Subordinator& G, std::span<const double> x, std::span<const int> l) {
    if (static_cast<int>(l.size()) != G.p)
        throw DimensionMismatch("hermite_coefficient: multi-index length != p");
    if (static_cast<int>(x.size()) != G.q())
        throw DimensionMismatch("hermite_coefficient: threshold dimension != q");
    int total = 0;
    for (int li : l) {
        if (li < 0) throw OrderTooLarge("hermite_coefficient: negative order");
        total += li;
    }
    if (total > kMaxHermiteOrder)
        throw OrderTooLarge("hermite_coefficient: total order exceeds cap");
}

// ---- separable path: product of 1-D region integrals -------------------

CoeffResult product_over_regions_impl(const std::vector<IntervalSet>& regions,
                                      std::span<const int> l, const QuadSpec& quad) {
    const int p = static_cast<int>(regions.size());
    std::vector<double> factors(static_cast<std::size_t>(p));
    std::vector<double> errors(static_cast<std::size_t>(p));
    for (int c = 0; c < p; ++c) {
        const auto& region = regions[static_cast<std::size_t>(c)];
        const int order = l[static_cast<std::size_t>(c)];
        if (region.is_empty()) return {0.0, 0.0};
        if (order == 0) {
            factors[static_cast<std::size_t>(c)] = region.normal_mass();
            errors[static_cast<std::size_t>(c)] = 1e-15;
        } else if (region.is_all()) {
            // E H_q(X) = 0 exactly for q >= 1
            return {0.0, 0.0};
        } else {
            auto res = integrate_over(
                [order](double s) { return hermite(order, s) * normal_pdf(s); }, region,
                to_options(quad));
            if (!res.converged)
                throw QuadratureNotConverged(
                    "hermite_coefficient: 1-D panel budget exhausted");
            factors[static_cast<std::size_t>(c)] = res.value;
            errors[static_cast<std::size_t>(c)] = res.error;
        }
    }
    double value = 1.0;
    for (double f : factors) value *= f;
    double err = 0.0;
    for (int c = 0; c < p; ++c) {
        double partial = errors[static_cast<std::size_t>(c)];
        for (int c2 = 0; c2 < p; ++c2)
            if (c2 != c) partial *= std::abs(factors[static_cast<std::size_t>(c2)]);
        err += partial;
    }
    return {value, err};
}

CoeffResult separable_coefficient(const Subordinator& G, std::span<const double> x,
                                  std::span<const int> l, const QuadSpec& quad) {
    return product_over_regions_impl(coordinate_regions(G, x), l, quad);
}

// ---- nested adaptive path for non-separable G, p <= 3 -------------------

struct Constraint {
    const Component* comp;
    double threshold;
};

// Sublevel interval for the innermost coordinate given values of the
// outer coordinates; constraints not touching coordinate 0 act as 0/1
// gates.
IntervalSet inner_region(const std::vector<Constraint>& constraints,
                         std::span<const double> outer, bool& gate_closed) {
    gate_closed = false;
    IntervalSet region = IntervalSet::all();
    for (const auto& cst : constraints) {
        if (const auto* lin = std::get_if<LinearComp>(cst.comp)) {
            double rest = 0.0;
            for (std::size_t i = 1; i < lin->weights.size(); ++i)
                rest += lin->weights[i] * outer[i - 1];
            const double w0 = lin->weights.empty() ? 0.0 : lin->weights[0];
            const double rhs = cst.threshold - rest;
            if (w0 == 0.0) {
                if (!(0.0 <= rhs)) {
                    gate_closed = true;
                    return IntervalSet::empty();
                }
            } else if (w0 > 0.0) {
                region = region.intersect(IntervalSet::of(-kInf, rhs / w0));
            } else {
                region = region.intersect(IntervalSet::of(rhs / w0, kInf));
            }
        } else {
            const int c = component_coord(*cst.comp);
            if (c == 0) {
                region = region.intersect(component_sublevel(*cst.comp, cst.threshold));
            } else {
                // fixed coordinate: evaluate the membership gate
                const double s = outer[c - 1];
                if (!component_sublevel(*cst.comp, cst.threshold).contains(s)) {
                    gate_closed = true;
                    return IntervalSet::empty();
                }
            }
        }
        if (region.is_empty()) return region;
    }
    return region;
}

CoeffResult nested_coefficient(const Subordinator& G, std::span<const double> x,
                               std::span<const int> l, const QuadSpec& quad) {
    std::vector<Constraint> constraints;
    for (int j = 0; j < G.q(); ++j) {
        if (x[j] == kInf) continue;
        if (x[j] == -kInf) return {0.0, 0.0};
        constraints.push_back({&G.components[j], x[j]});
    }

    QuadratureOptions outer_opts = to_options(quad);
    QuadratureOptions inner_opts = outer_opts;
    inner_opts.abs_tol *= 0.1;
    inner_opts.rel_tol *= 0.1;

    double worst_inner_error = 0.0;

    // recursion over coordinates p-1 ... 1, innermost is coordinate 0
    std::vector<double> outer_vals(static_cast<std::size_t>(G.p - 1), 0.0);
    std::function<double(int)> level = [&](int d) -> double {
        if (d == 0) {
            bool gate_closed = false;
            const IntervalSet region = inner_region(constraints, outer_vals, gate_closed);
            if (gate_closed || region.is_empty()) return 0.0;
            const int order = l[0];
            if (order == 0 && region.is_all()) return 1.0;
            if (order == 0) return region.normal_mass();
            auto res = integrate_over(
                [order](double s) { return hermite(order, s) * normal_pdf(s); }, region,
                inner_opts);
            worst_inner_error = std::max(worst_inner_error, res.error);
            return res.value;
        }
        const int order = l[d];
        auto res = integrate_adaptive(
            [&, d, order](double s) {
                outer_vals[d - 1] = s;
                return hermite(order, s) * normal_pdf(s) * level(d - 1);
            },
            -kQuadCutoff, kQuadCutoff, d == G.p - 1 ? outer_opts : inner_opts);
        if (d == G.p - 1 && !res.converged)
            throw QuadratureNotConverged("hermite_coefficient: nested panel budget exhausted");
        if (d == G.p - 1) worst_inner_error += res.error;
        return res.value;
    };

    const double value = level(G.p - 1);
    // heuristic: outer estimate plus the worst inner-panel residual
    return {value, worst_inner_error};
}

// ---- quasi-Monte Carlo path for p > 3 -----------------------------------

constexpr int kHaltonPrimes[10] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

CoeffResult qmc_coefficient(const Subordinator& G, std::span<const double> x,
                            std::span<const int> l, const QuadSpec& quad) {
    if (G.p > 10)
        throw SizeCapExceeded("hermite_coefficient: QMC supports p <= 10");
    const int batches = std::max(2, quad.qmc_batches);
    const std::uint64_t per_batch = static_cast<std::uint64_t>(quad.qmc_points) / batches;
    std::vector<double> batch_means(batches, 0.0);
    std::vector<double> z(G.p);
    std::uint64_t idx = 64; // skip the low-index Halton warmup
    for (int b = 0; b < batches; ++b) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i < per_batch; ++i, ++idx) {
            for (int d = 0; d < G.p; ++d)
                z[d] = normal_quantile(radical_inverse(idx, kHaltonPrimes[d]));
            const auto y = G.evaluate(z);
            bool below = true;
            for (int j = 0; j < G.q() && below; ++j) below = (y[j] <= x[j]);
            if (!below) continue;
            acc += hermite_multi(l, z);
        }
        batch_means[b] = acc / static_cast<double>(per_batch);
    }
    double mean = 0.0;
    for (double m : batch_means) mean += m;
    mean /= batches;
    double var = 0.0;
    for (double m : batch_means) var += (m - mean) * (m - mean);
    var /= (batches - 1);
    const double se = std::sqrt(var / batches);
    return {mean, se};
}

} // namespace

CoeffResult hermite_coefficient(const Subordinator& G, std::span<const double> x,
                                std::span<const int> l, const QuadSpec& quad) {
    check_dims(G, x, l);
    for (double xv : x)
        if (xv == -kInf) return {0.0, 0.0}; // empty region, exact
    if (G.separable()) return separable_coefficient(G, x, l, quad);
    if (G.p <= 3) return nested_coefficient(G, x, l, quad);
    return qmc_coefficient(G, x, l, quad);
}

CoeffResult distribution_value(const Subordinator& G, std::span<const double> x,
                               const QuadSpec& quad) {
    std::vector<int> zeros(static_cast<std::size_t>(G.p), 0);
    return hermite_coefficient(G, x, zeros, quad);
}

CoeffResult hermite_coefficient_box(const Subordinator& G, std::span<const double> a,
                                    std::span<const double> b, std::span<const int> l,
                                    const QuadSpec& quad) {
    check_dims(G, b, l);
    if (!G.separable())
        throw DimensionMismatch("hermite_coefficient_box: subordinator not separable");
    return product_over_regions_impl(coordinate_regions_box(G, a, b), l, quad);
}

double box_probability(const Subordinator& G, std::span<const double> a,
                       std::span<const double> b) {
    if (!G.separable())
        throw DimensionMismatch("box_probability: subordinator not separable");
    const auto regions = coordinate_regions_box(G, a, b);
    double mass = 1.0;
    for (const auto& region : regions) mass *= region.normal_mass();
    return mass;
}

PointRank hermite_rank_at(const Subordinator& G, std::span<const double> x, int qmax,
                          double tol, const QuadSpec& quad) {
    if (qmax < 1) throw OrderTooLarge("hermite_rank_at: qmax must be >= 1");
    PointRank out;
    out.tol_used = tol;
    for (int q = 1; q <= qmax; ++q) {
        for (const auto& idx : multi_indices_of_order(G.p, q)) {
            const auto c = hermite_coefficient(G, x, idx, quad);
            const double zero_tol = std::max(tol, 10.0 * c.error);
            out.tol_used = std::max(out.tol_used, zero_tol);
            if (std::abs(c.value) > zero_tol) {
                out.rank = q;
                out.witness_index = idx;
                out.witness_value = c.value;
                return out;
            }
        }
    }
    out.exceeded = true;
    out.rank = qmax + 1;
    return out;
}

RankResult hermite_rank_family(const Subordinator& G, const EvaluationGrid& grid,
                               int qmax, double tol, const QuadSpec& quad) {
    grid.validate();
    if (grid.dims() != G.q())
        throw GridMismatch("hermite_rank_family: grid dimension != q");
    RankResult out;
    out.exceeded = true;
    out.family_rank = qmax + 1;
    out.tol_used = tol;
    const std::size_t lattice = grid.lattice_size();
    out.pointwise.assign(lattice, -1);
    for (std::size_t flat = 0; flat < lattice; ++flat) {
        const auto pt = grid.point_at(flat);
        const auto pr = hermite_rank_at(G, pt, qmax, tol, quad);
        out.tol_used = std::max(out.tol_used, pr.tol_used);
        if (pr.exceeded) continue;
        out.pointwise[flat] = pr.rank;
        if (out.exceeded || pr.rank < out.family_rank) {
            out.exceeded = false;
            out.family_rank = pr.rank;
            out.witness_x = pt;
            out.witness_index = pr.witness_index;
            out.witness_value = pr.witness_value;
        }
    }
    return out;
}

std::optional<std::size_t> HermiteCoeffTable::index_position(std::span<const int> l) const {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i].size() == l.size() &&
            std::equal(indices[i].begin(), indices[i].end(), l.begin()))
            return i;
    }
    return std::nullopt;
}

HermiteCoeffTable coefficient_table(const Subordinator& G, const EvaluationGrid& grid,
                                    int max_order, const QuadSpec& quad) {
    grid.validate();
    if (grid.dims() != G.q())
        throw GridMismatch("coefficient_table: grid dimension != q");
    HermiteCoeffTable table;
    table.grid = grid;
    table.p = G.p;
    table.max_order = max_order;
    for (int q = 1; q <= max_order; ++q)
        for (auto& idx : multi_indices_of_order(G.p, q)) table.indices.push_back(idx);

    const std::size_t lattice = grid.lattice_size();
    table.F.resize(lattice);
    table.coeffs.resize(lattice);
    for (std::size_t flat = 0; flat < lattice; ++flat) {
        const auto pt = grid.point_at(flat);
        table.F[flat] = distribution_value(G, pt, quad).value;
        table.coeffs[flat].reserve(table.indices.size());
        for (const auto& idx : table.indices)
            table.coeffs[flat].push_back(hermite_coefficient(G, pt, idx, quad));
    }
    return table;
}

} // namespace lrdseq
