#pragma once

#include <functional>

#include "lrdseq/intervals.hpp"

namespace lrdseq {

// Integrands of the form (polynomial of order <= 64) * normal density are
// below 1e-15 in absolute tail mass outside [-26, 26], so panels are
// clipped there.
inline constexpr double kQuadCutoff = 26.0;

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_panels = 4000;
    double seed_width = 2.0; // initial panel width before adaptive splitting
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    int panels = 0;
    bool converged = true;
};

// Globally adaptive Gauss-Kronrod 7-15 on a finite interval. Splits the
// worst panel until the summed error estimate meets
// max(abs_tol, rel_tol*|value|) or the panel budget runs out (converged
// is then false; no throw, callers decide).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, const QuadratureOptions& opts = {});

// Same, over a union of intervals; infinite endpoints are clipped to
// +-kQuadCutoff. Empty or fully-clipped regions integrate to zero.
QuadratureResult integrate_over(const std::function<double(double)>& f,
                                const IntervalSet& region,
                                const QuadratureOptions& opts = {});

} // namespace lrdseq
