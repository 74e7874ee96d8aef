#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrdseq/coefficients.hpp"
#include "lrdseq/subordinator.hpp"

namespace lrdseq {

// Exact mass of |H_m| phi over a region: between consecutive roots of H_m
// the sign is constant and the antiderivative of H_m phi is -H_{m-1} phi,
// so the integral is a finite signed sum. m = 0 degenerates to the normal
// mass.
double abs_hermite_mass(int m, const IntervalSet& region);

enum class SubordinationMode { univariate, multivariate };

// One dimension of the Lambda function: a monotone nondecreasing
// piecewise-linear table with explicit jumps (left/right values per
// knot). Lambda(-inf) = 0, Lambda(+inf) = total. The generalized inverse
// and every downstream consumer treat the interpolant as the function,
// which keeps the chaining identities exact at table resolution.
struct LambdaTable {
    std::vector<double> x;     // finite knots, ascending
    std::vector<double> left;  // Lambda(x_i-)
    std::vector<double> right; // Lambda(x_i)
    double total = 0.0;

    double value(double xq) const;      // right-continuous evaluation
    double left_value(double xq) const; // left limit
    // inf{x : Lambda(x) >= level}; +inf when the level is never reached
    // (flagged by convention), clamped at the lowest knot for levels
    // below table resolution.
    double generalized_inverse(double level) const;
};

struct LambdaSpec {
    SubordinationMode mode = SubordinationMode::univariate;
    int m = 1;
    std::vector<LambdaTable> dims;
    double total = 0.0; // common Lambda_j(inf)

    double increment(std::span<const double> xlo, std::span<const double> xhi) const;
};

// Lambda_j(x) = F_j(x) + integral over {G_j <= x} of |H_m|/m! (univariate
// subordination) or the order-m multi-index sum (multivariate). Tables
// carry `knots` quantile-spaced knots plus the jump knots contributed by
// indicator/constant components. Requires a separable subordinator.
LambdaSpec build_lambda(const Subordinator& G, int m, SubordinationMode mode,
                        int knots = 4096);

// Dyadic chaining points x_0 = -inf < x_1 <= ... <= x_{2^k} = +inf with
// x_i = inf{x : Lambda_j(x) >= Lambda(inf) i 2^-k}. Level k <= 20.
std::vector<double> chaining_points(const LambdaSpec& lambda, int dim, int k);

struct PartitionScheme {
    int p = 0;
    int K = 0;
    // points[dim][level k][i], level 0 is {-inf, +inf}
    std::vector<std::vector<std::vector<double>>> points;
};

PartitionScheme build_scheme(const LambdaSpec& lambda, int K);

// (k+1)^p - k^p index tuples of quality k (max component = k).
long long partitions_of_quality(int p, int k);

// All tuples (k_1,...,k_p) in {0..K}^p with quality 1..K, grouped by
// quality. p <= 4, K <= 12.
std::vector<std::vector<std::vector<int>>> enumerate_partitions(int p, int K);

struct Box {
    std::vector<double> lo, hi;      // the box prod_j (lo_j, hi_j]
    std::vector<int> partition_tuple; // (l_1+1, ..., l_p+1)
};

struct Decomposition {
    std::vector<Box> boxes; // possibly empty boxes kept (atoms duplicate points)
    std::vector<double> a_corner, b_corner;
};

// Decomposition of the lower quadrant at a_x(K) into at most K^p
// disjoint boxes, one from each partition with all levels >= 1.
Decomposition decompose(std::span<const double> x, int K, const PartitionScheme& scheme);

struct DominationReport {
    int pairs = 0;
    int violations = 0;
    double worst_margin = 0.0; // min over pairs of DeltaLambda - max(DeltaF, |DeltaJ|)
};

// Verifies F(y)-F(x) <= Lambda(y)-Lambda(x) and the order-m coefficient
// increment bound for every supplied pair x <= y.
DominationReport lambda_domination_report(
    const Subordinator& G, int m, const LambdaSpec& lambda,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double tol = 1e-6, const QuadSpec& quad = {});

// Same, but throws DominationViolated when any margin dips below -tol
// (signals a quadrature or construction bug).
DominationReport lambda_domination_check(
    const Subordinator& G, int m, SubordinationMode mode, const LambdaSpec& lambda,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double tol = 1e-6, const QuadSpec& quad = {});

} // namespace lrdseq
