#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lrdseq/intervals.hpp"

namespace lrdseq {

// A measurable map G: R^p -> R^q assembled from a fixed component catalog.
// Every component except `linear` reads a single input coordinate, which
// keeps sublevel sets {s : G_j(s) <= x} exactly representable as interval
// unions per coordinate.

struct IdentityComp { int coord = 0; };
struct SquareComp { int coord = 0; };
struct AbsComp { int coord = 0; };
struct PolyComp {
    int coord = 0;
    std::vector<double> coeffs; // c0 + c1 s + c2 s^2 + ...
};
struct IndicatorComp {
    int coord = 0;
    IntervalSet set; // component value is 1_{s in set}
};
struct LinearComp {
    std::vector<double> weights; // length p
};

using Component =
    std::variant<IdentityComp, SquareComp, AbsComp, PolyComp, IndicatorComp, LinearComp>;

struct Subordinator {
    int p = 1;
    std::vector<Component> components;

    int q() const { return static_cast<int>(components.size()); }
    void validate() const; // throws DimensionMismatch / ConfigError

    // G(s) evaluated rowwise.
    std::vector<double> evaluate(std::span<const double> s) const;

    // True when no linear component mixes two or more coordinates, i.e.
    // the sublevel region factorizes over input coordinates.
    bool separable() const;
};

// {s : comp(s) <= threshold} in the component's own input coordinate.
// strict selects {comp(s) < threshold}; the two differ only for
// components with atoms in their output distribution (indicator,
// constant polynomials), where the distinction carries the jump
// structure of F and Lambda. Only valid for single-coordinate
// components (linear included iff it has at most one nonzero weight).
IntervalSet component_sublevel(const Component& comp, double threshold,
                               bool strict = false);

int component_coord(const Component& comp); // -1 for multi-coordinate linear

// P(comp(X) <= x) for a standard normal input; handles linear of any
// dimension through the N(0, ||w||^2) law.
double component_cdf(const Component& comp, double x);

// Per-input-coordinate region of {s : G(s) <= x} for separable G.
// x may carry +-inf sentinels: +inf drops the constraint, -inf empties
// the region. Coordinates no component reads stay at the full line.
std::vector<IntervalSet> coordinate_regions(const Subordinator& G,
                                            std::span<const double> x);

// Same for the box {s : a < G(s) <= b} (componentwise).
std::vector<IntervalSet> coordinate_regions_box(const Subordinator& G,
                                                std::span<const double> a,
                                                std::span<const double> b);

std::string component_kind_name(const Component& comp);

} // namespace lrdseq
