#include <doctest.h>

#include <cmath>

#include "lrdseq/covariance.hpp"
#include "lrdseq/errors.hpp"
#include "lrdseq/rng.hpp"
#include "lrdseq/sampling.hpp"
#include "lrdseq/stats.hpp"

using namespace lrdseq;

namespace {

CovarianceModel fgn_model(double D, int p = 1) {
    CovarianceModel model;
    model.p = p;
    model.D = D;
    model.kind = LagLaw::fgn;
    model.cross = Eigen::MatrixXd::Identity(p, p);
    return model;
}

CovarianceModel iid_model() {
    CovarianceModel model;
    model.p = 1;
    model.D = 0.5;
    model.kind = LagLaw::pure_power;
    model.L.param = 0.0; // r(k) = 0 for k >= 1
    model.max_Np = 16384;
    return model;
}

} // namespace

TEST_CASE("autocovariance values") {
    auto model = iid_model();
    model.L.param = 1.0;
    model.D = 0.4;
    CHECK(model.autocovariance(1, 1, 0) == 1.0);

    // fgn H = 0.75: gamma(1) = 2^{1/2} - 1
    const auto fgn = fgn_model(0.5);
    CHECK(fgn.hurst() == doctest::Approx(0.75));
    CHECK(fgn.autocovariance(1, 1, 1) ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));

    // p=2 pure power: c_12 L(k) k^-D
    CovarianceModel cross;
    cross.p = 2;
    cross.D = 0.5;
    cross.kind = LagLaw::pure_power;
    cross.cross = Eigen::MatrixXd::Identity(2, 2);
    cross.cross(0, 1) = cross.cross(1, 0) = 0.3;
    CHECK(cross.autocovariance(1, 2, 4) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(cross.autocovariance(1, 2, 0) == 0.0);
    CHECK_THROWS_AS(cross.autocovariance(0, 1, 1), IndexOutOfRange);
    CHECK_THROWS_AS(cross.autocovariance(1, 3, 1), IndexOutOfRange);
}

TEST_CASE("fgn autocovariance decays like the pure power law") {
    const auto model = fgn_model(0.4);
    const double H = model.hurst();
    for (long k : {64L, 256L, 1024L}) {
        const double ratio = model.autocovariance(1, 1, k) /
                             (H * (2.0 * H - 1.0) * std::pow(k, -model.D));
        CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("build_covariance basics") {
    // iid: 3x3 identity
    const auto sigma = build_covariance(iid_model(), 3);
    CHECK(sigma.rows() == 3);
    CHECK((sigma - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

    // fgn H=0.75, N=2
    const auto s2 = build_covariance(fgn_model(0.5), 2);
    CHECK(s2(0, 1) == doctest::Approx(0.41421356).epsilon(1e-7));
    CHECK(s2(0, 0) == 1.0);

    // cap
    auto capped = fgn_model(0.5);
    capped.max_Np = 16;
    CHECK_THROWS_AS(build_covariance(capped, 17), SizeCapExceeded);
}

TEST_CASE("inadmissible cross structure is rejected by the pivot check") {
    CovarianceModel model;
    model.p = 2;
    model.D = 0.1;
    model.kind = LagLaw::pure_power;
    model.cross = Eigen::MatrixXd::Ones(2, 2);
    try {
        build_covariance(model, 64);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.smallest_pivot < 0.0);
    }
}

TEST_CASE("admissible multivariate fgn cross structure factors cleanly") {
    CovarianceModel model = fgn_model(0.4, 2);
    model.cross(0, 1) = model.cross(1, 0) = 0.4;
    const auto factor = factor_covariance(model, 64);
    CHECK(factor.smallest_pivot > 0.0);
    CHECK_FALSE(factor.used_ldlt);
    // reconstruction
    const auto sigma = build_covariance(model, 64);
    const double err =
        (factor.transform * factor.transform.transpose() - sigma).cwiseAbs().maxCoeff();
    CHECK(err < 1e-10);
}

TEST_CASE("psi diagnostic") {
    CovarianceModel model;
    model.p = 1;
    model.D = 0.5;
    model.kind = LagLaw::pure_power;
    CHECK(compute_psi(model, 4) == doctest::Approx(0.5).epsilon(1e-12));

    CovarianceModel multi;
    multi.p = 2;
    multi.D = 0.5;
    multi.kind = LagLaw::pure_power;
    multi.cross = Eigen::MatrixXd::Identity(2, 2);
    multi.cross(0, 1) = multi.cross(1, 0) = 0.5;
    CHECK(compute_psi(multi, 1) == doctest::Approx(1.5).epsilon(1e-12));

    // psi decays to zero along a dyadic ladder
    double prev = compute_psi(multi, 1);
    for (long k = 2; k <= 1024; k *= 2) {
        const double cur = compute_psi(multi, k);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 0.1);

    // smallest block with psi(bk) <= 1: psi(k) = 1.5 k^{-1/2} -> b = 3
    CHECK(smallest_psi_block(multi) == 3);
}

TEST_CASE("log-power slowly varying family") {
    CovarianceModel model;
    model.p = 1;
    model.D = 0.5;
    model.kind = LagLaw::pure_power;
    model.L.kind = SlowlyVarying::Kind::log_power;
    model.L.param = 1.0;
    // r(k) = (1 + log k)^a k^-D
    CHECK(model.autocovariance(1, 1, 2) ==
          doctest::Approx((1.0 + std::log(2.0)) / std::sqrt(2.0)).epsilon(1e-12));
    // L(1) = 1 forces r(1) = 1 (perfect lag-1 correlation), so for N >= 3
    // the assembled covariance is inconsistent and the pivot check must
    // reject it rather than patch it.
    CHECK(model.autocovariance(1, 1, 1) == 1.0);
    CHECK_THROWS_AS(build_covariance(model, 8), NotPositiveDefinite);

    // fgn refuses a non-unit L instead of silently ignoring it
    CovarianceModel bad = model;
    bad.kind = LagLaw::fgn;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("path sampling determinism and layout") {
    const auto model = fgn_model(0.5);
    const auto a = sample_path(model, 64, 42);
    const auto b = sample_path(model, 64, 42);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    const auto c = sample_path(model, 64, 43);
    CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.values.rows() == 64);
    CHECK(a.values.cols() == 1);
}

TEST_CASE("prefix nesting: shorter paths are prefixes under the same seed") {
    const auto model = fgn_model(0.4);
    const auto long_path = sample_path(model, 128, 7);
    const auto short_path = sample_path(model, 32, 7);
    CHECK((long_path.values.topRows(32) - short_path.values).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("iid sampler lag-1 autocovariance is near zero") {
    const long N = 10000;
    const auto path = sample_path(iid_model(), N, 99);
    double acc = 0.0;
    for (long j = 0; j + 1 < N; ++j) acc += path.values(j, 0) * path.values(j + 1, 0);
    const double r1 = acc / static_cast<double>(N - 1);
    CHECK(std::abs(r1) < 4.0 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("fgn sampler reproduces the model autocovariance (pooled)") {
    const auto model = fgn_model(0.5); // H = 0.75
    const long N = 1 << 10;
    const int R = 200;
    PathSampler sampler(model, N);
    std::vector<double> estimates;
    for (int r = 0; r < R; ++r) {
        const auto path = sampler.sample(derive_seed(2027, static_cast<std::uint64_t>(r)));
        double acc = 0.0;
        for (long j = 0; j + 1 < N; ++j) acc += path.values(j, 0) * path.values(j + 1, 0);
        estimates.push_back(acc / static_cast<double>(N - 1));
    }
    const double pooled = sample_mean(estimates);
    const double se = std::sqrt(sample_variance(estimates) / R);
    CHECK(std::abs(pooled - model.autocovariance(1, 1, 1)) <= 3.0 * se);
}

TEST_CASE("multivariate sampler reproduces the cross covariance") {
    CovarianceModel model = fgn_model(0.4, 2);
    model.cross(0, 1) = model.cross(1, 0) = 0.4;
    const long N = 1 << 9;
    const int R = 200;
    PathSampler sampler(model, N);
    std::vector<double> estimates;
    for (int r = 0; r < R; ++r) {
        const auto path = sampler.sample(derive_seed(11, static_cast<std::uint64_t>(r)));
        double acc = 0.0;
        for (long j = 0; j + 2 < N; ++j) acc += path.values(j, 0) * path.values(j + 2, 1);
        estimates.push_back(acc / static_cast<double>(N - 2));
    }
    const double pooled = sample_mean(estimates);
    const double se = std::sqrt(sample_variance(estimates) / R);
    CHECK(std::abs(pooled - model.autocovariance(1, 2, 2)) <= 3.0 * se);
}

TEST_CASE("subordinate applies G rowwise") {
    const auto path = sample_path(iid_model(), 16, 5);
    Subordinator G{1, {Component(SquareComp{0}), Component(IdentityComp{0})}};
    const auto Y = subordinate(G, path);
    CHECK(Y.rows() == 16);
    CHECK(Y.cols() == 2);
    for (long j = 0; j < 16; ++j) {
        CHECK(Y(j, 0) == doctest::Approx(path.values(j, 0) * path.values(j, 0)));
        CHECK(Y(j, 1) == path.values(j, 0));
    }
}

TEST_CASE("model validation rejects bad fields") {
    CovarianceModel model = fgn_model(0.5);
    model.D = 1.5;
    CHECK_THROWS_AS(model.validate(), ConfigError);
    model = fgn_model(0.5);
    model.cross(0, 0) = 2.0;
    CHECK_THROWS_AS(model.validate(), ConfigError);
    model = fgn_model(0.5, 2);
    model.cross(0, 1) = 0.3; // asymmetric
    CHECK_THROWS_AS(model.validate(), ConfigError);
}
