#include "polaron/core/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "polaron/error.hpp"

namespace polaron::core {

LegendreValue legendre(int l, double x) {
  if (l == 0) return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // derivative from the standard recurrence; at the endpoints use the closed form
  double dp;
  if (std::abs(1.0 - x * x) < 1e-14) {
    dp = 0.5 * l * (l + 1.0) * (x > 0 ? 1.0 : ((l % 2 == 0) ? -1.0 : 1.0));
  } else {
    dp = l * (x * p1 - p0) / (x * x - 1.0);
  }
  return {p1, dp};
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto v = legendre(n, x);
      const double dx = v.p / v.dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto v = legendre(n, x);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * v.dp * v.dp);
  }
  return rule;
}

QuadratureRule gauss_lobatto(int n) {
  if (n < 2) throw InvalidArgument("gauss_lobatto: n must be >= 2");
  const int m = n - 1;  // interior nodes are the roots of P'_m
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  for (int i = 1; i < m; ++i) {
    double x = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it) {
      // Newton on P'_m using P''_m = (2x P'_m - m(m+1) P_m) / (1 - x^2)
      const auto v = legendre(m, x);
      const double d2 = (2.0 * x * v.dp - m * (m + 1.0) * v.p) / (1.0 - x * x);
      const double dx = v.dp / d2;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    const double p = legendre(m, rule.nodes[i]).p;
    rule.weights[i] = 2.0 / (m * (m + 1.0) * p * p);
  }
  return rule;
}

std::vector<double> lagrange_basis(const std::vector<double>& nodes, double x) {
  const std::size_t n = nodes.size();
  std::vector<double> out(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) out[j] *= (x - nodes[k]) / (nodes[j] - nodes[k]);
    }
  }
  return out;
}

}  // namespace polaron::core
