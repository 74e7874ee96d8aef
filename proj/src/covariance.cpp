#include "lrdseq/covariance.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "lrdseq/errors.hpp"

namespace lrdseq {

double SlowlyVarying::operator()(double k) const {
    switch (kind) {
        case Kind::constant: return param;
        case Kind::log_power: return std::pow(1.0 + std::log(k), param);
    }
    return param;
}

double fgn_gamma(double hurst, double k) {
    if (k == 0.0) return 1.0;
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                  std::pow(std::abs(k - 1.0), h2));
}

void CovarianceModel::validate() const {
    if (p < 1) throw ConfigError("model.p must be >= 1");
    if (!(D > 0.0 && D < 1.0)) throw ConfigError("model.D must lie in (0,1)");
    if (L.kind == SlowlyVarying::Kind::constant && L.param < 0.0)
        throw ConfigError("model.slowly_varying.c must be >= 0 (0 = iid)");
    if (L.kind == SlowlyVarying::Kind::log_power && L.param < 0.0)
        throw ConfigError("model.slowly_varying.a must be >= 0");
    if (kind == LagLaw::fgn &&
        !(L.kind == SlowlyVarying::Kind::constant && L.param == 1.0))
        throw ConfigError("model.slowly_varying must be constant 1 for the fgn law");
    if (cross.rows() != p || cross.cols() != p)
        throw ConfigError("model.cross must be p x p");
    for (int i = 0; i < p; ++i) {
        if (cross(i, i) != 1.0)
            throw ConfigError("model.cross diagonal must be 1 (unit variance)");
        for (int j = 0; j < p; ++j)
            if (cross(i, j) != cross(j, i))
                throw ConfigError("model.cross must be symmetric");
    }
}

double CovarianceModel::autocovariance(int i, int j, long k) const {
    if (i < 1 || i > p || j < 1 || j > p)
        throw IndexOutOfRange("autocovariance: component index out of range");
    if (k < 0) throw IndexOutOfRange("autocovariance: negative lag");
    if (k == 0) return i == j ? 1.0 : 0.0;
    const double c = cross(i - 1, j - 1);
    if (kind == LagLaw::fgn) return c * fgn_gamma(hurst(), static_cast<double>(k));
    const double kd = static_cast<double>(k);
    return c * L(kd) * std::pow(kd, -D);
}

double compute_psi(const CovarianceModel& model, long k) {
    if (k < 1) throw IndexOutOfRange("compute_psi: lag must be >= 1");
    double worst = 0.0;
    for (int i = 1; i <= model.p; ++i) {
        double row = 0.0;
        for (int j = 1; j <= model.p; ++j)
            row += std::abs(model.autocovariance(i, j, k));
        worst = std::max(worst, row);
    }
    return worst;
}

int smallest_psi_block(const CovarianceModel& model, long lag_cap, int b_cap) {
    for (int b = 1; b <= b_cap; ++b) {
        bool ok = true;
        for (long k = 1; b * k <= lag_cap; ++k) {
            if (compute_psi(model, b * k) > 1.0) {
                ok = false;
                break;
            }
        }
        if (ok) return b;
    }
    return 0;
}

namespace {

Eigen::MatrixXd assemble(const CovarianceModel& model, long N) {
    model.validate();
    if (N < 1) throw SizeCapExceeded("build_covariance: N must be >= 1");
    const long n = N * model.p;
    if (n > model.max_Np)
        throw SizeCapExceeded("build_covariance: N*p = " + std::to_string(n) +
                              " exceeds cap " + std::to_string(model.max_Np));
    const int p = model.p;
    // lag blocks are shared by every diagonal of the block-Toeplitz matrix
    std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(N));
    for (long k = 0; k < N; ++k) {
        Eigen::MatrixXd blk(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) blk(i, j) = model.autocovariance(i + 1, j + 1, k);
        blocks[static_cast<std::size_t>(k)] = blk;
    }
    Eigen::MatrixXd sigma(n, n);
    for (long j = 0; j < N; ++j)
        for (long k = 0; k < N; ++k) {
            const auto& blk = blocks[static_cast<std::size_t>(std::labs(j - k))];
            // r^{(i,j)}(k) = E X^(i)_1 X^(j)_{1+k}: rows j>k use the transpose
            if (j <= k)
                sigma.block(j * p, k * p, p, p) = blk;
            else
                sigma.block(j * p, k * p, p, p) = blk.transpose();
        }
    return sigma;
}

} // namespace

CovarianceFactor factor_covariance(const CovarianceModel& model, long N,
                                   double pivot_rel_tol) {
    Eigen::MatrixXd sigma = assemble(model, N);
    const long n = sigma.rows();

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
        CovarianceFactor out;
        out.transform = llt.matrixL();
        double smallest = out.transform(0, 0);
        for (long i = 1; i < n; ++i) smallest = std::min(smallest, out.transform(i, i));
        out.smallest_pivot = smallest * smallest;
        return out;
    }

    // Semidefinite boundary: LDLT exposes the pivots.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    Eigen::VectorXd d = ldlt.vectorD();
    const double scale = d.size() > 0 ? d.maxCoeff() : 0.0;
    const double smallest = d.size() > 0 ? d.minCoeff() : 0.0;
    if (ldlt.info() != Eigen::Success || smallest < -pivot_rel_tol * std::max(scale, 1.0))
        throw NotPositiveDefinite(
            "covariance is not positive semidefinite (smallest pivot " +
                std::to_string(smallest) + "); inadmissible (c_ij, D, L) combination",
            smallest);

    CovarianceFactor out;
    out.used_ldlt = true;
    out.smallest_pivot = smallest;
    Eigen::VectorXd droot = d.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd lower = ldlt.matrixL();
    out.transform = ldlt.transpositionsP().transpose() * (lower * droot.asDiagonal());
    return out;
}

Eigen::MatrixXd build_covariance(const CovarianceModel& model, long N) {
    Eigen::MatrixXd sigma = assemble(model, N);
    factor_covariance(model, N); // admissibility gate, never silently patched
    return sigma;
}

} // namespace lrdseq
