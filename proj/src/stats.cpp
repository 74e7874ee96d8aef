#include "lrdseq/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lrdseq/errors.hpp"

namespace lrdseq {

double sample_mean(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double v : xs) acc += v;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = sample_mean(xs);
    double acc = 0.0;
    for (double v : xs) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(xs.size() - 1);
}

double sample_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw Error("sample_quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    if (q <= 0.0) return xs.front();
    if (q >= 1.0) return xs.back();
    const double h = (static_cast<double>(xs.size()) - 1.0) * q;
    const std::size_t i = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(i);
    if (i + 1 >= xs.size()) return xs.back();
    return xs[i] + frac * (xs[i + 1] - xs[i]);
}

double sample_median(const std::vector<double>& xs) {
    return sample_quantile(xs, 0.5);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw Error("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    }
    return d;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_slope: need >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = sample_mean(x);
    const double my = sample_mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += e * e;
        }
        fit.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

} // namespace lrdseq
