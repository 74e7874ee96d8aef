#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrdseq/grid.hpp"
#include "lrdseq/subordinator.hpp"

namespace lrdseq {

// Controls for the Hermite-coefficient integrals
//   J_{l_1,...,l_p}(x) = E( 1_{G(X) <= x} H_{l_1,...,l_p}(X) ).
// Separable subordinators factorize into per-coordinate 1-D integrals
// (tensorized quadrature); non-separable ones use nested adaptive
// quadrature for p <= 3 and Halton quasi-Monte Carlo beyond that.
struct QuadSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    int max_panels = 4000;
    int qmc_points = 200000;
    int qmc_batches = 16;
};

struct CoeffResult {
    double value = 0.0;
    double error = 0.0; // absolute error estimate (standard error for QMC)
};

// l = all-zero returns F(x) = P(G(X) <= x); the centered coefficient J_0
// is then zero by construction. x may carry +-inf sentinels: -inf makes
// the region empty (exact 0), +inf drops the coordinate's constraint.
// Throws QuadratureNotConverged when the panel budget is exhausted above
// tolerance.
CoeffResult hermite_coefficient(const Subordinator& G, std::span<const double> x,
                                std::span<const int> l, const QuadSpec& quad = {});

// F(x) with the same region machinery (exact mass for separable G,
// QMC with reported standard error otherwise at p > 3).
CoeffResult distribution_value(const Subordinator& G, std::span<const double> x,
                               const QuadSpec& quad = {});

// Box variants over A = {a < G(s) <= b}: J_l(A) = E(1_{G in A} H_l) and
// P(Y_1 in A). Separable subordinators only.
CoeffResult hermite_coefficient_box(const Subordinator& G, std::span<const double> a,
                                    std::span<const double> b, std::span<const int> l,
                                    const QuadSpec& quad = {});
double box_probability(const Subordinator& G, std::span<const double> a,
                       std::span<const double> b);

struct PointRank {
    int rank = 0;          // smallest total order with a nonzero coefficient
    bool exceeded = false; // no nonzero coefficient up to qmax
    std::vector<int> witness_index;
    double witness_value = 0.0;
    double tol_used = 0.0;
};

// Smallest total order q <= qmax with some |J| above
// max(tol, 10 * error estimate). A coefficient counts as zero only when
// the estimate and its error bound both sit below that threshold.
PointRank hermite_rank_at(const Subordinator& G, std::span<const double> x, int qmax,
                          double tol = 1e-7, const QuadSpec& quad = {});

struct RankResult {
    int family_rank = 0;
    bool exceeded = false;
    std::vector<double> witness_x;
    std::vector<int> witness_index;
    double witness_value = 0.0;
    double tol_used = 0.0;
    std::vector<int> pointwise; // per flat lattice index; -1 where exceeded
};

RankResult hermite_rank_family(const Subordinator& G, const EvaluationGrid& grid,
                               int qmax, double tol = 1e-7, const QuadSpec& quad = {});

// Batch table over the x lattice: F per point plus every multi-index of
// total order 1..max_order.
struct HermiteCoeffTable {
    EvaluationGrid grid;
    int p = 1;         // multi-index length (input dimension of G)
    int max_order = 0;
    std::vector<std::vector<int>> indices;        // orders 1..max_order, concatenated
    std::vector<double> F;                        // [lattice]
    std::vector<std::vector<CoeffResult>> coeffs; // [lattice][index position]

    std::optional<std::size_t> index_position(std::span<const int> l) const;
};

HermiteCoeffTable coefficient_table(const Subordinator& G, const EvaluationGrid& grid,
                                    int max_order, const QuadSpec& quad = {});

} // namespace lrdseq
