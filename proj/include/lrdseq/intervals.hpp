#pragma once

#include <limits>
#include <vector>

namespace lrdseq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A finite union of intervals on the extended real line, kept sorted,
// disjoint and merged. Endpoint openness is not tracked: every consumer
// (normal mass, quadrature, sampling-free probabilities) is insensitive
// to Lebesgue-null sets, and indicator thresholds are resolved by the
// subordinator layer before intervals are formed.
struct Interval {
    double lo;
    double hi; // lo <= hi; +-inf allowed
};

class IntervalSet {
public:
    IntervalSet() = default;

    static IntervalSet empty() { return IntervalSet(); }
    static IntervalSet all() { return of(-kInf, kInf); }
    static IntervalSet of(double lo, double hi);

    static IntervalSet from_parts(std::vector<Interval> parts); // normalizes

    bool is_empty() const { return parts_.empty(); }
    bool is_all() const;
    const std::vector<Interval>& parts() const { return parts_; }

    bool contains(double x) const;

    IntervalSet intersect(const IntervalSet& other) const;
    IntervalSet unite(const IntervalSet& other) const;
    IntervalSet complement() const;

    // P(X in set) for X standard normal; exact up to erfc accuracy.
    double normal_mass() const;

private:
    std::vector<Interval> parts_;
};

} // namespace lrdseq
