#include "lrdseq/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/normal.hpp"

namespace lrdseq {

namespace {

// int_a^b H_m(s) phi(s) ds via the antiderivative -H_{m-1} phi (m >= 1).
double hermite_phi_antiderivative(int m, double t) {
    if (t == kInf || t == -kInf) return 0.0;
    return -hermite(m - 1, t) * normal_pdf(t);
}

double signed_segment(int m, double a, double b) {
    return hermite_phi_antiderivative(m, b) - hermite_phi_antiderivative(m, a);
}

} // namespace

double abs_hermite_mass(int m, const IntervalSet& region) {
    if (m == 0) return region.normal_mass();
    const auto roots = hermite_roots(m);
    double mass = 0.0;
    for (const auto& iv : region.parts()) {
        // split [lo, hi] at the roots; sign is constant per segment
        std::vector<double> cuts;
        cuts.push_back(iv.lo);
        for (double r : roots)
            if (r > iv.lo && r < iv.hi) cuts.push_back(r);
        cuts.push_back(iv.hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            double probe;
            if (a == -kInf && b == kInf)
                probe = roots.empty() ? 0.0 : roots.front() - 1.0;
            else if (a == -kInf)
                probe = b - 1.0;
            else if (b == kInf)
                probe = a + 1.0;
            else
                probe = 0.5 * (a + b);
            const double sign = hermite(m, probe) >= 0.0 ? 1.0 : -1.0;
            mass += sign * signed_segment(m, a, b);
        }
    }
    return mass;
}

// ---- LambdaTable ---------------------------------------------------------

double LambdaTable::value(double xq) const {
    if (x.empty()) return 0.0;
    if (xq == -kInf || xq < x.front()) return xq >= x.front() ? right.front() : 0.0;
    if (xq >= x.back()) return xq == x.back() ? right.back() : total;
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    if (x[i] == xq) return right[i];
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    return right[i] + t * (left[i + 1] - right[i]);
}

double LambdaTable::left_value(double xq) const {
    if (x.empty()) return 0.0;
    const auto it = std::lower_bound(x.begin(), x.end(), xq);
    if (it != x.end() && *it == xq) {
        return left[static_cast<std::size_t>(it - x.begin())];
    }
    if (xq == kInf) return total;
    return value(xq);
}

double LambdaTable::generalized_inverse(double level) const {
    if (x.empty()) return kInf;
    if (level <= 0.0) return -kInf;
    if (level > right.back()) {
        // above the last knot the interpolant continues to `total`
        if (level > total) return kInf;
        if (total == right.back()) return kInf; // level == total reached at +inf only
        return x.back(); // conservative: resolution exhausted at the right edge
    }
    if (level <= right.front()) return x.front(); // below table resolution: clamp

    // smallest knot index with right[i] >= level
    std::size_t lo = 0, hi = x.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (right[mid] >= level)
            hi = mid;
        else
            lo = mid + 1;
    }
    const std::size_t i = lo; // right[i] >= level, right[i-1] < level
    if (left[i] >= level) {
        // crossing inside the segment (i-1, i)
        const double lo_val = right[i - 1];
        const double hi_val = left[i];
        const double t = (level - lo_val) / (hi_val - lo_val);
        return x[i - 1] + t * (x[i] - x[i - 1]);
    }
    return x[i]; // jump at the knot covers the level; inf attained there
}

double LambdaSpec::increment(std::span<const double> xlo,
                             std::span<const double> xhi) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < dims.size(); ++j)
        acc += dims[j].value(xhi[j]) - dims[j].value(xlo[j]);
    return acc;
}

// ---- build_lambda --------------------------------------------------------

namespace {

struct LambdaEvaluator {
    const Component* comp;
    int m;
    SubordinationMode mode;
    int p;
    // multivariate mode: per multi-index, the product of E|H_{l_d}| over
    // the coordinates the component does not read, divided by prod l_i!
    std::vector<std::vector<int>> indices;
    std::vector<double> outer_factors;
    int coord = 0;

    double eval(double xq, bool strict) const {
        if (xq == kInf && !strict) return total();
        if (xq == -kInf) return 0.0;
        const IntervalSet region = component_sublevel(*comp, xq, strict);
        const double Fv = region.normal_mass();
        if (mode == SubordinationMode::univariate)
            return Fv + abs_hermite_mass(m, region) / factorial(m);
        double acc = Fv;
        for (std::size_t i = 0; i < indices.size(); ++i)
            acc += outer_factors[i] * abs_hermite_mass(indices[i][coord], region);
        return acc;
    }

    double total() const {
        if (mode == SubordinationMode::univariate)
            return 1.0 + abs_hermite_mass(m, IntervalSet::all()) / factorial(m);
        double acc = 1.0;
        for (std::size_t i = 0; i < indices.size(); ++i)
            acc += outer_factors[i] * abs_hermite_mass(indices[i][coord], IntervalSet::all());
        return acc;
    }
};

// Thresholds where the component's output law has atoms; Lambda_j jumps
// exactly there.
std::vector<double> jump_thresholds(const Component& comp) {
    if (std::holds_alternative<IndicatorComp>(comp)) return {0.0, 1.0};
    if (const auto* poly = std::get_if<PolyComp>(&comp)) {
        int deg = -1;
        for (std::size_t i = 0; i < poly->coeffs.size(); ++i)
            if (poly->coeffs[i] != 0.0) deg = static_cast<int>(i);
        if (deg <= 0) return {poly->coeffs.empty() ? 0.0 : poly->coeffs[0]};
    }
    if (const auto* lin = std::get_if<LinearComp>(&comp)) {
        bool all_zero = true;
        for (double w : lin->weights) all_zero = all_zero && w == 0.0;
        if (all_zero) return {0.0};
    }
    return {};
}

} // namespace

LambdaSpec build_lambda(const Subordinator& G, int m, SubordinationMode mode,
                        int knots) {
    G.validate();
    if (!G.separable())
        throw DimensionMismatch("build_lambda: requires a separable subordinator");
    if (m < 1 || m > kMaxHermiteOrder)
        throw OrderTooLarge("build_lambda: rank out of range");
    if (knots < 16) knots = 16;

    LambdaSpec spec;
    spec.mode = mode;
    spec.m = m;

    // shared multivariate decoration
    std::vector<std::vector<int>> indices;
    std::vector<double> expectations; // E|H_l(Z)| per univariate order l
    if (mode == SubordinationMode::multivariate) {
        indices = multi_indices_of_order(G.p, m);
        expectations.resize(static_cast<std::size_t>(m) + 1);
        for (int l = 0; l <= m; ++l)
            expectations[static_cast<std::size_t>(l)] =
                abs_hermite_mass(l, IntervalSet::all());
    }

    for (const auto& comp : G.components) {
        LambdaEvaluator ev;
        ev.comp = &comp;
        ev.m = m;
        ev.mode = mode;
        ev.p = G.p;
        ev.coord = component_coord(comp);
        if (mode == SubordinationMode::multivariate) {
            ev.indices = indices;
            ev.outer_factors.resize(indices.size());
            for (std::size_t i = 0; i < indices.size(); ++i) {
                double f = 1.0 / multi_factorial(indices[i]);
                for (int d = 0; d < G.p; ++d)
                    if (d != ev.coord)
                        f *= expectations[static_cast<std::size_t>(indices[i][d])];
                ev.outer_factors[i] = f;
            }
        }

        const double total = ev.total();

        // knot x-locations: exact-Lambda quantiles plus jump thresholds
        std::vector<double> xs;
        const double lo_level = total * std::pow(2.0, -24);
        const double hi_level = total * (1.0 - std::pow(2.0, -24));
        auto invert = [&](double level) {
            double lo = -64.0, hi = 64.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (ev.eval(mid, false) >= level)
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        };
        xs.push_back(invert(lo_level));
        for (int i = 1; i <= knots; ++i)
            xs.push_back(invert(total * static_cast<double>(i) / (knots + 1)));
        xs.push_back(invert(hi_level));
        for (double t : jump_thresholds(comp)) xs.push_back(t);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end(),
                             [](double a, double b) {
                                 return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a));
                             }),
                 xs.end());

        LambdaTable table;
        table.total = total;
        table.x = xs;
        table.left.reserve(xs.size());
        table.right.reserve(xs.size());
        for (double xq : xs) {
            table.right.push_back(ev.eval(xq, false));
            table.left.push_back(ev.eval(xq, true));
        }
        spec.dims.push_back(std::move(table));
    }

    spec.total = spec.dims.front().total;
    for (const auto& t : spec.dims)
        if (std::abs(t.total - spec.total) > 1e-9 * (1.0 + spec.total))
            throw Error("build_lambda: Lambda_j(inf) differs across dimensions");
    return spec;
}

std::vector<double> chaining_points(const LambdaSpec& lambda, int dim, int k) {
    if (dim < 0 || dim >= static_cast<int>(lambda.dims.size()))
        throw IndexOutOfRange("chaining_points: dimension out of range");
    if (k < 0 || k > 20) throw CapExceeded("chaining_points: level must be in [0, 20]");
    std::vector<double> pts;
    const std::size_t count = static_cast<std::size_t>(1) << k;
    pts.reserve(count + 1);
    pts.push_back(-kInf);
    const double scale = std::pow(2.0, -k);
    for (std::size_t i = 1; i < count; ++i)
        pts.push_back(lambda.dims[static_cast<std::size_t>(dim)].generalized_inverse(
            lambda.total * static_cast<double>(i) * scale));
    pts.push_back(kInf);
    return pts;
}

PartitionScheme build_scheme(const LambdaSpec& lambda, int K) {
    if (K < 1 || K > 12) throw CapExceeded("build_scheme: K must be in [1, 12]");
    PartitionScheme scheme;
    scheme.p = static_cast<int>(lambda.dims.size());
    scheme.K = K;
    scheme.points.resize(static_cast<std::size_t>(scheme.p));
    for (int d = 0; d < scheme.p; ++d) {
        for (int k = 0; k <= K; ++k)
            scheme.points[static_cast<std::size_t>(d)].push_back(
                chaining_points(lambda, d, k));
    }
    return scheme;
}

long long partitions_of_quality(int p, int k) {
    auto ipow = [](long long base, int exp) {
        long long v = 1;
        for (int i = 0; i < exp; ++i) v *= base;
        return v;
    };
    return ipow(k + 1, p) - ipow(k, p);
}

std::vector<std::vector<std::vector<int>>> enumerate_partitions(int p, int K) {
    if (p < 1 || p > 4) throw CapExceeded("enumerate_partitions: p must be in [1, 4]");
    if (K < 1 || K > 12) throw CapExceeded("enumerate_partitions: K must be in [1, 12]");
    std::vector<std::vector<std::vector<int>>> grouped(static_cast<std::size_t>(K));
    std::vector<int> tuple(static_cast<std::size_t>(p), 0);
    while (true) {
        int quality = 0;
        for (int v : tuple) quality = std::max(quality, v);
        if (quality >= 1) grouped[static_cast<std::size_t>(quality - 1)].push_back(tuple);
        int d = p - 1;
        while (d >= 0 && tuple[static_cast<std::size_t>(d)] == K) {
            tuple[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
        ++tuple[static_cast<std::size_t>(d)];
    }
    return grouped;
}

namespace {

// index i with points[i] <= x <= points[i+1]; with duplicated points the
// largest such i (right-continuity convention), capped at 2^k - 1.
std::size_t bracket_index(const std::vector<double>& pts, double x) {
    std::size_t i = 0;
    for (std::size_t idx = 0; idx < pts.size(); ++idx)
        if (pts[idx] <= x) i = idx;
    return std::min(i, pts.size() - 2);
}

} // namespace

Decomposition decompose(std::span<const double> x, int K, const PartitionScheme& scheme) {
    if (static_cast<int>(x.size()) != scheme.p)
        throw DimensionMismatch("decompose: point dimension != scheme dimension");
    if (K < 1 || K > scheme.K) throw CapExceeded("decompose: K exceeds scheme quality");

    const int p = scheme.p;
    Decomposition out;
    out.a_corner.resize(static_cast<std::size_t>(p));
    out.b_corner.resize(static_cast<std::size_t>(p));

    // chaining point below/above x per dimension per level
    std::vector<std::vector<double>> below(static_cast<std::size_t>(p));
    for (int d = 0; d < p; ++d) {
        for (int k = 0; k <= K; ++k) {
            const auto& pts = scheme.points[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
            const std::size_t i = bracket_index(pts, x[d]);
            below[static_cast<std::size_t>(d)].push_back(pts[i]);
            if (k == K) {
                out.a_corner[static_cast<std::size_t>(d)] = pts[i];
                out.b_corner[static_cast<std::size_t>(d)] = pts[i + 1];
            }
        }
    }

    std::vector<int> levels(static_cast<std::size_t>(p), 0);
    while (true) {
        Box box;
        box.lo.resize(static_cast<std::size_t>(p));
        box.hi.resize(static_cast<std::size_t>(p));
        box.partition_tuple.resize(static_cast<std::size_t>(p));
        for (int d = 0; d < p; ++d) {
            const int l = levels[static_cast<std::size_t>(d)];
            box.lo[static_cast<std::size_t>(d)] = below[static_cast<std::size_t>(d)][static_cast<std::size_t>(l)];
            box.hi[static_cast<std::size_t>(d)] = below[static_cast<std::size_t>(d)][static_cast<std::size_t>(l) + 1];
            box.partition_tuple[static_cast<std::size_t>(d)] = l + 1;
        }
        out.boxes.push_back(std::move(box));
        int d = p - 1;
        while (d >= 0 && levels[static_cast<std::size_t>(d)] == K - 1) {
            levels[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
        ++levels[static_cast<std::size_t>(d)];
    }
    return out;
}

DominationReport lambda_domination_report(
    const Subordinator& G, int m, const LambdaSpec& lambda,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double tol, const QuadSpec& quad) {
    DominationReport report;
    report.worst_margin = kInf;
    const auto indices = multi_indices_of_order(G.p, m);
    for (const auto& [xlo, xhi] : pairs) {
        ++report.pairs;
        const double dLambda = lambda.increment(xlo, xhi);
        const double dF =
            distribution_value(G, xhi, quad).value - distribution_value(G, xlo, quad).value;
        double dJ = 0.0;
        for (const auto& idx : indices) {
            const double inc = hermite_coefficient(G, xhi, idx, quad).value -
                               hermite_coefficient(G, xlo, idx, quad).value;
            dJ += inc / multi_factorial(idx); // = /m! when p = 1
        }
        const double margin = dLambda - std::max(dF, std::abs(dJ));
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < -tol) ++report.violations;
    }
    return report;
}

DominationReport lambda_domination_check(
    const Subordinator& G, int m, SubordinationMode /*mode*/, const LambdaSpec& lambda,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double tol, const QuadSpec& quad) {
    DominationReport report = lambda_domination_report(G, m, lambda, pairs, tol, quad);
    if (report.violations > 0)
        throw DominationViolated("lambda_domination_check: " +
                                 std::to_string(report.violations) +
                                 " pair(s) violate the increment bound; worst margin " +
                                 std::to_string(report.worst_margin));
    return report;
}

} // namespace lrdseq
