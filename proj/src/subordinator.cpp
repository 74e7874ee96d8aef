#include "lrdseq/subordinator.hpp"

#include <algorithm>
#include <cmath>

#include "lrdseq/errors.hpp"
#include "lrdseq/normal.hpp"

namespace lrdseq {

namespace {

constexpr double kRootScan = 64.0;
constexpr int kRootScanSteps = 8192;

double poly_eval(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
    return v;
}

int poly_degree(const std::vector<double>& c) {
    int deg = -1;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) deg = static_cast<int>(i);
    return deg;
}

// {s : P(s) <= thr} by locating the real roots of P - thr on a scan range
// and reading the sign between them. Tangential roots only perturb the
// set by null sets, which no consumer observes.
IntervalSet poly_sublevel(const std::vector<double>& coeffs, double thr) {
    const int deg = poly_degree(coeffs);
    if (deg <= 0) {
        const double c0 = coeffs.empty() ? 0.0 : coeffs[0];
        return c0 <= thr ? IntervalSet::all() : IntervalSet::empty();
    }
    auto g = [&](double s) { return poly_eval(coeffs, s) - thr; };

    std::vector<double> roots;
    double prev_s = -kRootScan;
    double prev_v = g(prev_s);
    for (int i = 1; i <= kRootScanSteps; ++i) {
        const double s = -kRootScan + 2.0 * kRootScan * i / kRootScanSteps;
        const double v = g(s);
        if ((prev_v <= 0.0 && v > 0.0) || (prev_v > 0.0 && v <= 0.0)) {
            double lo = prev_s, hi = s;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((g(lo) <= 0.0) == (g(mid) <= 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_s = s;
        prev_v = v;
    }

    std::vector<double> knots;
    knots.push_back(-kInf);
    for (double r : roots) knots.push_back(r);
    knots.push_back(kInf);

    std::vector<Interval> below;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        double probe;
        if (lo == -kInf && hi == kInf)
            probe = 0.0;
        else if (lo == -kInf)
            probe = hi - 1.0;
        else if (hi == kInf)
            probe = lo + 1.0;
        else
            probe = 0.5 * (lo + hi);
        if (g(probe) <= 0.0) below.push_back({lo, hi});
    }
    return IntervalSet::from_parts(std::move(below));
}

} // namespace

int component_coord(const Component& comp) {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, LinearComp>) {
                int coord = -1;
                int nonzero = 0;
                for (std::size_t i = 0; i < c.weights.size(); ++i)
                    if (c.weights[i] != 0.0) {
                        ++nonzero;
                        coord = static_cast<int>(i);
                    }
                return nonzero <= 1 ? std::max(coord, 0) : -1;
            } else {
                return c.coord;
            }
        },
        comp);
}

IntervalSet component_sublevel(const Component& comp, double threshold, bool strict) {
    if (std::isnan(threshold)) return IntervalSet::empty();
    return std::visit(
        [&](const auto& c) -> IntervalSet {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IdentityComp>) {
                return IntervalSet::of(-kInf, threshold);
            } else if constexpr (std::is_same_v<T, SquareComp>) {
                if (threshold < 0.0) return IntervalSet::empty();
                const double r = std::sqrt(threshold);
                return IntervalSet::of(-r, r);
            } else if constexpr (std::is_same_v<T, AbsComp>) {
                if (threshold < 0.0) return IntervalSet::empty();
                return IntervalSet::of(-threshold, threshold);
            } else if constexpr (std::is_same_v<T, PolyComp>) {
                if (poly_degree(c.coeffs) <= 0) {
                    const double c0 = c.coeffs.empty() ? 0.0 : c.coeffs[0];
                    const bool in = strict ? (c0 < threshold) : (c0 <= threshold);
                    return in ? IntervalSet::all() : IntervalSet::empty();
                }
                return poly_sublevel(c.coeffs, threshold);
            } else if constexpr (std::is_same_v<T, IndicatorComp>) {
                // Values are exactly 0 and 1.
                const bool covers1 = strict ? (threshold > 1.0) : (threshold >= 1.0);
                const bool covers0 = strict ? (threshold > 0.0) : (threshold >= 0.0);
                if (covers1) return IntervalSet::all();
                if (covers0) return c.set.complement();
                return IntervalSet::empty();
            } else { // LinearComp, at most one nonzero weight
                double w = 0.0;
                int nonzero = 0;
                for (double wi : c.weights)
                    if (wi != 0.0) {
                        ++nonzero;
                        w = wi;
                    }
                if (nonzero > 1)
                    throw DimensionMismatch(
                        "component_sublevel: linear component mixes coordinates");
                if (nonzero == 0) {
                    const bool in = strict ? (0.0 < threshold) : (0.0 <= threshold);
                    return in ? IntervalSet::all() : IntervalSet::empty();
                }
                if (w > 0.0) return IntervalSet::of(-kInf, threshold / w);
                return IntervalSet::of(threshold / w, kInf);
            }
        },
        comp);
}

double component_cdf(const Component& comp, double x) {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    if (const auto* lin = std::get_if<LinearComp>(&comp)) {
        double norm2 = 0.0;
        for (double w : lin->weights) norm2 += w * w;
        if (norm2 == 0.0) return x >= 0.0 ? 1.0 : 0.0;
        return normal_cdf(x / std::sqrt(norm2));
    }
    return component_sublevel(comp, x).normal_mass();
}

void Subordinator::validate() const {
    if (p < 1) throw ConfigError("subordinator.p must be >= 1");
    if (components.empty()) throw ConfigError("subordinator.components must be nonempty");
    for (std::size_t j = 0; j < components.size(); ++j) {
        const auto& comp = components[j];
        const std::string where = "subordinator.components[" + std::to_string(j) + "]";
        if (const auto* lin = std::get_if<LinearComp>(&comp)) {
            if (static_cast<int>(lin->weights.size()) != p)
                throw ConfigError(where + ".weights must have length p");
            for (double w : lin->weights)
                if (!std::isfinite(w)) throw ConfigError(where + ".weights must be finite");
        } else {
            const int c = std::visit(
                [](const auto& cc) -> int {
                    using T = std::decay_t<decltype(cc)>;
                    if constexpr (std::is_same_v<T, LinearComp>)
                        return 0;
                    else
                        return cc.coord;
                },
                comp);
            if (c < 0 || c >= p)
                throw ConfigError(where + ".coord out of range [1, p]");
        }
        if (const auto* poly = std::get_if<PolyComp>(&comp)) {
            if (poly->coeffs.empty()) throw ConfigError(where + ".coeffs must be nonempty");
            for (double v : poly->coeffs)
                if (!std::isfinite(v)) throw ConfigError(where + ".coeffs must be finite");
        }
    }
}

std::vector<double> Subordinator::evaluate(std::span<const double> s) const {
    if (static_cast<int>(s.size()) != p)
        throw DimensionMismatch("Subordinator::evaluate: input dimension mismatch");
    std::vector<double> out;
    out.reserve(components.size());
    for (const auto& comp : components) {
        out.push_back(std::visit(
            [&](const auto& c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, IdentityComp>) {
                    return s[c.coord];
                } else if constexpr (std::is_same_v<T, SquareComp>) {
                    return s[c.coord] * s[c.coord];
                } else if constexpr (std::is_same_v<T, AbsComp>) {
                    return std::abs(s[c.coord]);
                } else if constexpr (std::is_same_v<T, PolyComp>) {
                    return poly_eval(c.coeffs, s[c.coord]);
                } else if constexpr (std::is_same_v<T, IndicatorComp>) {
                    return c.set.contains(s[c.coord]) ? 1.0 : 0.0;
                } else {
                    double acc = 0.0;
                    for (int i = 0; i < static_cast<int>(c.weights.size()); ++i)
                        acc += c.weights[i] * s[i];
                    return acc;
                }
            },
            comp));
    }
    return out;
}

bool Subordinator::separable() const {
    for (const auto& comp : components)
        if (component_coord(comp) < 0) return false;
    return true;
}

std::vector<IntervalSet> coordinate_regions(const Subordinator& G,
                                            std::span<const double> x) {
    if (static_cast<int>(x.size()) != G.q())
        throw DimensionMismatch("coordinate_regions: threshold dimension mismatch");
    std::vector<IntervalSet> regions(G.p, IntervalSet::all());
    for (int j = 0; j < G.q(); ++j) {
        if (x[j] == kInf) continue; // no constraint
        const int c = component_coord(G.components[j]);
        if (c < 0)
            throw DimensionMismatch("coordinate_regions: subordinator not separable");
        if (x[j] == -kInf) {
            regions[c] = IntervalSet::empty();
            continue;
        }
        regions[c] = regions[c].intersect(component_sublevel(G.components[j], x[j]));
    }
    return regions;
}

std::vector<IntervalSet> coordinate_regions_box(const Subordinator& G,
                                                std::span<const double> a,
                                                std::span<const double> b) {
    if (static_cast<int>(a.size()) != G.q() || static_cast<int>(b.size()) != G.q())
        throw DimensionMismatch("coordinate_regions_box: corner dimension mismatch");
    std::vector<IntervalSet> regions(G.p, IntervalSet::all());
    for (int j = 0; j < G.q(); ++j) {
        const int c = component_coord(G.components[j]);
        if (c < 0)
            throw DimensionMismatch("coordinate_regions_box: subordinator not separable");
        IntervalSet slab = (b[j] == kInf) ? IntervalSet::all()
                                          : component_sublevel(G.components[j], b[j]);
        if (a[j] != -kInf)
            slab = slab.intersect(component_sublevel(G.components[j], a[j]).complement());
        regions[c] = regions[c].intersect(slab);
    }
    return regions;
}

std::string component_kind_name(const Component& comp) {
    return std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IdentityComp>) return "identity";
            else if constexpr (std::is_same_v<T, SquareComp>) return "square";
            else if constexpr (std::is_same_v<T, AbsComp>) return "abs";
            else if constexpr (std::is_same_v<T, PolyComp>) return "poly";
            else if constexpr (std::is_same_v<T, IndicatorComp>) return "indicator";
            else return "linear";
        },
        comp);
}

} // namespace lrdseq
