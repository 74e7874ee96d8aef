#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lrdseq/coefficients.hpp"
#include "lrdseq/grid.hpp"

namespace lrdseq {

// F(x) on the x lattice. Default source is the coefficient table's
// distribution slot (exact region mass / quadrature); the Monte Carlo
// fallback records its standard error so reports can flag it.
struct DistributionTable {
    enum class Source { quadrature, monte_carlo };
    std::vector<double> F; // per flat lattice index
    Source source = Source::quadrature;
    double mc_standard_error = 0.0;
};

DistributionTable distribution_table(const Subordinator& G, const EvaluationGrid& grid,
                                     const QuadSpec& quad = {});

// R_N(x,t) = #{j <= floor(Nt): Y_j <= x} - floor(Nt) F(x) on the lattice.
struct SeqEmpiricalSurface {
    EvaluationGrid grid;
    long N = 0;
    // values[t][flat lattice index]
    std::vector<std::vector<double>> values;
    std::vector<std::vector<long>> counts; // exact integer counting part
    DistributionTable::Source f_source = DistributionTable::Source::quadrature;
    double f_mc_standard_error = 0.0;
};

SeqEmpiricalSurface sequential_empirical(const Eigen::MatrixXd& Y,
                                         const EvaluationGrid& grid,
                                         const DistributionTable& F);

// CSV rendering of a surface, header "t,x1..xq,value", LF endings.
std::string surface_csv(const SeqEmpiricalSurface& surface);

// d_N = sqrt(Var sum_{j<=N} H_m(X_j)) for a stationary standard process
// with autocovariance r:
//   d_N^2 = m! ( N + 2 sum_{k=1}^{N-1} (N-k) r(k)^m ).
double normalization(const std::function<double(long)>& r, int m, long N);

// The order-m coefficient block of a table, ready for fast surface
// evaluation: per lattice point the factors J_l(x) / (l_1! ... l_p!).
struct LeadingTermSpec {
    std::vector<std::vector<int>> indices;          // all |l| = m
    std::vector<std::vector<double>> factors;        // [flat][index]
    int m = 0;
};

LeadingTermSpec make_leading_spec(const HermiteCoeffTable& table, int m);

// (sum_{|l|=m} J_l(x)/prod l! * sum_{j<=floor(Nt)} H_l(X_j)) / d_N
// on the (x, t) lattice. For p = 1 this is J_m(x)/m! * d_N^{-1} sum H_m.
std::vector<std::vector<double>> leading_term_surface(const Eigen::MatrixXd& X,
                                                      const LeadingTermSpec& spec,
                                                      const EvaluationGrid& grid,
                                                      double d_N);

// Reduction-principle statistic
//   S_N(n,x) = d_N^{-1} sum_{j<=n} ( 1_{Y_j<=x} - F(x) - leading term ),
// scanned over every n <= N with the sup taken over the finite x lattice
// (a lower bound for the true sup; densify the grid to tighten it).
struct ReductionResult {
    std::vector<double> per_n_sup; // sup_x |S_N(n, x)|, n = 1..N
    double max_stat = 0.0;         // max over n
    long argmax_n = 0;
};

ReductionResult reduction_statistic(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                    const LeadingTermSpec& spec,
                                    const EvaluationGrid& grid,
                                    const DistributionTable& F, double d_N);

} // namespace lrdseq
