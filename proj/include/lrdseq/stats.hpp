#pragma once

#include <functional>
#include <vector>

namespace lrdseq {

double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs); // unbiased
double sample_quantile(std::vector<double> xs, double q); // type-7 interpolation
double sample_median(const std::vector<double>& xs);

// sup_x |F_n(x) - F(x)| for a sorted-or-not sample against a cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// two-sample sup distance between empirical cdfs.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0; // residual-based; 0 for a 2-point fit
};

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace lrdseq
