#include "lrdseq/hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lrdseq/errors.hpp"

namespace lrdseq {

double hermite(int n, double y) {
    if (n < 0) throw OrderTooLarge("hermite: negative order");
    if (n > kMaxHermiteOrder)
        throw OrderTooLarge("hermite: order " + std::to_string(n) + " exceeds cap " +
                            std::to_string(kMaxHermiteOrder));
    double hm1 = 0.0, h = 1.0;
    for (int k = 0; k < n; ++k) {
        const double next = y * h - static_cast<double>(k) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

double hermite_multi(std::span<const int> l, std::span<const double> x) {
    if (l.size() != x.size())
        throw DimensionMismatch("hermite_multi: index length " + std::to_string(l.size()) +
                                " vs point dimension " + std::to_string(x.size()));
    double prod = 1.0;
    for (std::size_t i = 0; i < l.size(); ++i) prod *= hermite(l[i], x[i]);
    return prod;
}

double factorial(int n) {
    if (n < 0 || n > kMaxHermiteOrder) throw OrderTooLarge("factorial: order out of range");
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double multi_factorial(std::span<const int> l) {
    double f = 1.0;
    for (int li : l) f *= factorial(li);
    return f;
}

namespace {

void enumerate(int p, int remaining, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == p - 1) {
        cur.push_back(remaining);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur.push_back(v);
        enumerate(p, remaining - v, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<std::vector<int>> multi_indices_of_order(int p, int m) {
    if (p < 1) throw DimensionMismatch("multi_indices_of_order: p < 1");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    enumerate(p, m, cur, out);
    return out;
}

std::vector<std::pair<std::vector<int>, double>>
expand_hermite_linear(int m, std::span<const double> a) {
    double norm2 = 0.0;
    for (double v : a) norm2 += v * v;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw NotUnitNorm("expand_hermite_linear: weight vector is not unit norm");
    const int p = static_cast<int>(a.size());
    std::vector<std::pair<std::vector<int>, double>> out;
    const double mfac = factorial(m);
    for (auto& idx : multi_indices_of_order(p, m)) {
        double coeff = mfac / multi_factorial(idx);
        for (int j = 0; j < p; ++j)
            for (int e = 0; e < idx[j]; ++e) coeff *= a[j];
        out.emplace_back(idx, coeff);
    }
    return out;
}

std::vector<double> hermite_roots(int m) {
    if (m < 1 || m > kMaxHermiteOrder) throw OrderTooLarge("hermite_roots: order out of range");
    // Jacobi matrix for the probabilists' weight: zero diagonal,
    // off-diagonal sqrt(k).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    std::vector<double> roots(es.eigenvalues().data(), es.eigenvalues().data() + m);
    return roots;
}

} // namespace lrdseq
