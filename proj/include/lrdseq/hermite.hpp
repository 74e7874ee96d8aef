#pragma once

#include <span>
#include <utility>
#include <vector>

namespace lrdseq {

// Probabilists' Hermite polynomials, orthogonal under the standard normal
// density with E H_n(X)^2 = n!. Three-term recurrence
//   H_{n+1}(y) = y H_n(y) - n H_{n-1}(y).
inline constexpr int kMaxHermiteOrder = 64;

double hermite(int n, double y);

// Product polynomial H_{l_1,...,l_p}(x) = H_{l_1}(x^(1)) ... H_{l_p}(x^(p)).
double hermite_multi(std::span<const int> l, std::span<const double> x);

// n! as double, n <= kMaxHermiteOrder.
double factorial(int n);

// prod l_i! for a multi-index.
double multi_factorial(std::span<const int> l);

// All multi-indices (l_1,...,l_p) >= 0 with l_1+...+l_p == m,
// lexicographically ordered.
std::vector<std::vector<int>> multi_indices_of_order(int p, int m);

// Expansion of H_m(a . x) for a unit vector a into products of univariate
// Hermite polynomials:
//   H_m(sum a_j x_j) = sum_{m_1+..+m_p=m} m!/(m_1!..m_p!) prod a_j^{m_j} H_{m_j}(x_j).
// Returns (multi-index, coefficient) pairs covering every index of total
// order m. Throws NotUnitNorm unless | ||a||_2 - 1 | <= 1e-12.
std::vector<std::pair<std::vector<int>, double>>
expand_hermite_linear(int m, std::span<const double> a);

// Roots of H_m (Golub-Welsch on the Jacobi matrix), ascending.
std::vector<double> hermite_roots(int m);

} // namespace lrdseq
