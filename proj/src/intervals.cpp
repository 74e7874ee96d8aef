#include "lrdseq/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "lrdseq/errors.hpp"
#include "lrdseq/normal.hpp"

namespace lrdseq {

IntervalSet IntervalSet::of(double lo, double hi) {
    IntervalSet s;
    if (!(lo > hi) && !(std::isnan(lo) || std::isnan(hi))) s.parts_.push_back({lo, hi});
    return s;
}

IntervalSet IntervalSet::from_parts(std::vector<Interval> parts) {
    std::erase_if(parts, [](const Interval& iv) {
        return iv.lo > iv.hi || std::isnan(iv.lo) || std::isnan(iv.hi);
    });
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalSet s;
    for (const auto& iv : parts) {
        if (!s.parts_.empty() && iv.lo <= s.parts_.back().hi) {
            s.parts_.back().hi = std::max(s.parts_.back().hi, iv.hi);
        } else {
            s.parts_.push_back(iv);
        }
    }
    return s;
}

bool IntervalSet::is_all() const {
    return parts_.size() == 1 && parts_[0].lo == -kInf && parts_[0].hi == kInf;
}

bool IntervalSet::contains(double x) const {
    for (const auto& iv : parts_)
        if (x >= iv.lo && x <= iv.hi) return true;
    return false;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    std::vector<Interval> out;
    for (const auto& a : parts_)
        for (const auto& b : other.parts_) {
            const double lo = std::max(a.lo, b.lo);
            const double hi = std::min(a.hi, b.hi);
            if (lo <= hi) out.push_back({lo, hi});
        }
    return from_parts(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Interval> out = parts_;
    out.insert(out.end(), other.parts_.begin(), other.parts_.end());
    return from_parts(std::move(out));
}

IntervalSet IntervalSet::complement() const {
    std::vector<Interval> out;
    double cursor = -kInf;
    for (const auto& iv : parts_) {
        if (iv.lo > cursor) out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < kInf) out.push_back({cursor, kInf});
    // Degenerate boundary intervals ({a,a}) are harmless null sets.
    return from_parts(std::move(out));
}

double IntervalSet::normal_mass() const {
    double mass = 0.0;
    for (const auto& iv : parts_) mass += normal_cdf(iv.hi) - normal_cdf(iv.lo);
    return std::min(1.0, std::max(0.0, mass));
}

} // namespace lrdseq
