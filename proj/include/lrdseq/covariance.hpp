#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace lrdseq {

// Slowly varying factor L(k): constants and log powers cover every
// experiment in scope. c == 0 is the documented degenerate case giving an
// iid sequence (r(k) = 0 for k >= 1).
struct SlowlyVarying {
    enum class Kind { constant, log_power } kind = Kind::constant;
    double param = 1.0; // c for constant, exponent a for (1 + log k)^a

    double operator()(double k) const;
};

enum class LagLaw {
    fgn,       // r(k) = c_ij * gamma_H(k), H = 1 - D/2; valid for every N
    pure_power // r(k) = c_ij * L(k) * k^-D; admissibility decided by the PD check
};

// Exact fGn autocovariance gamma_H(k) = ((k+1)^2H - 2 k^2H + |k-1|^2H)/2,
// which behaves like H(2H-1) k^-D for D = 2 - 2H.
double fgn_gamma(double hurst, double k);

struct CovarianceModel {
    int p = 1;
    double D = 0.5;
    SlowlyVarying L;
    LagLaw kind = LagLaw::fgn;
    Eigen::MatrixXd cross = Eigen::MatrixXd::Identity(1, 1); // (c_ij), diag 1
    long max_Np = 8192;

    double hurst() const { return 1.0 - D / 2.0; }
    void validate() const;

    // r^{(i,j)}(k) with 1-based components; delta_ij at lag 0.
    double autocovariance(int i, int j, long k) const;
};

// Dependence diagnostic
//   psi(k) = max_i sum_j |r^{(i,j)}(k)|  (row and column maxima coincide
// for a symmetric cross matrix).
double compute_psi(const CovarianceModel& model, long k);

// Smallest block length b with psi(b k) <= 1 for all k >= 1, probed up to
// lag_cap; 0 when no b <= b_cap works.
int smallest_psi_block(const CovarianceModel& model, long lag_cap = 4096,
                       int b_cap = 4096);

// Np x Np block-Toeplitz covariance, block (j,k) = [r^{(i,i')}(|j-k|)].
// Runs the pivot-based positive-semidefiniteness check and throws
// NotPositiveDefinite (with the smallest pivot) or SizeCapExceeded.
Eigen::MatrixXd build_covariance(const CovarianceModel& model, long N);

struct CovarianceFactor {
    Eigen::MatrixXd transform; // B with B B^T = Sigma
    double smallest_pivot = 0.0;
    bool used_ldlt = false; // semidefinite fallback path
};

// Factor Sigma for sampling: Cholesky fast path, LDLT fallback for the
// semidefinite boundary (pivots within tolerance of zero are clamped,
// anything below -tol*scale throws NotPositiveDefinite).
CovarianceFactor factor_covariance(const CovarianceModel& model, long N,
                                   double pivot_rel_tol = 1e-10);

} // namespace lrdseq
