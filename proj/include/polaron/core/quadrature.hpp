#pragma once

#include <vector>

namespace polaron::core {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Legendre polynomial P_l(x) and its derivative.
struct LegendreValue {
  double p;
  double dp;
};
LegendreValue legendre(int l, double x);

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Lobatto rule on [-1, 1] (includes both endpoints).
QuadratureRule gauss_lobatto(int n);

/// Values of the Lagrange basis polynomials through `nodes`, evaluated at x.
std::vector<double> lagrange_basis(const std::vector<double>& nodes, double x);

}  // namespace polaron::core
