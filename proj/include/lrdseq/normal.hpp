#pragma once

#include <cmath>

namespace lrdseq {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

inline double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Phi via erfc keeps full relative accuracy in the lower tail.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

// Inverse of normal_cdf. Acklam's rational approximation refined by one
// Halley step; good to ~1e-15 over (0, 1).
double normal_quantile(double p);

} // namespace lrdseq
