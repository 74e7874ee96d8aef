#include "lrdseq/sampling.hpp"

#include "lrdseq/errors.hpp"
#include "lrdseq/rng.hpp"

namespace lrdseq {

PathSampler::PathSampler(const CovarianceModel& model, long N)
    : N_(N), p_(model.p), model_(model), factor_(factor_covariance(model, N)) {}

GaussianPath PathSampler::sample(std::uint64_t seed) const {
    const long n = N_ * p_;
    NormalSampler normals(seed);
    Eigen::VectorXd z(n);
    for (long i = 0; i < n; ++i) z(i) = normals.next();
    Eigen::VectorXd stacked = factor_.transform * z;

    GaussianPath path;
    path.model = model_;
    path.N = N_;
    path.seed = seed;
    path.values.resize(N_, p_);
    for (long j = 0; j < N_; ++j)
        for (int i = 0; i < p_; ++i) path.values(j, i) = stacked(j * p_ + i);
    return path;
}

GaussianPath sample_path(const CovarianceModel& model, long N, std::uint64_t seed) {
    return PathSampler(model, N).sample(seed);
}

Eigen::MatrixXd subordinate(const Subordinator& G, const GaussianPath& path) {
    if (G.p != static_cast<int>(path.values.cols()))
        throw DimensionMismatch("subordinate: path dimension != subordinator input dimension");
    Eigen::MatrixXd out(path.N, G.q());
    std::vector<double> row(static_cast<std::size_t>(G.p));
    for (long j = 0; j < path.N; ++j) {
        for (int i = 0; i < G.p; ++i) row[static_cast<std::size_t>(i)] = path.values(j, i);
        const auto y = G.evaluate(row);
        for (int k = 0; k < G.q(); ++k) out(j, k) = y[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace lrdseq
