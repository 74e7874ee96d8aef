#pragma once

#include <cstdint>

#include "lrdseq/covariance.hpp"
#include "lrdseq/subordinator.hpp"

namespace lrdseq {

// An exact finite-length draw from the model: values = B z with B the
// covariance factor and z the deterministic standard-normal stream of
// `seed`. Bit-exact reproducible from (model, N, seed) and immutable.
struct GaussianPath {
    Eigen::MatrixXd values; // N x p, row j = X_j
    CovarianceModel model;
    long N = 0;
    std::uint64_t seed = 0;
};

// Factors the block-Toeplitz covariance once and amortizes it over many
// replications (the factor is read-only and safe to share across
// threads). Leading principal blocks of a Toeplitz Cholesky factor are
// the factors of the shorter covariance, so a prefix of a sampled path
// is exactly the path the same seed would produce at the shorter length.
class PathSampler {
public:
    PathSampler(const CovarianceModel& model, long N); // NotPositiveDefinite etc.

    GaussianPath sample(std::uint64_t seed) const;

    long length() const { return N_; }
    int dim() const { return p_; }
    const CovarianceFactor& factor() const { return factor_; }

private:
    long N_;
    int p_;
    CovarianceModel model_;
    CovarianceFactor factor_;
};

GaussianPath sample_path(const CovarianceModel& model, long N, std::uint64_t seed);

// Y_j = G(X_j) rowwise, N x q.
Eigen::MatrixXd subordinate(const Subordinator& G, const GaussianPath& path);

} // namespace lrdseq
