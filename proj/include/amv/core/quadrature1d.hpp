#pragma once

#include <functional>
#include <vector>

namespace amv {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, nodes from Newton iteration on P_n.
GaussLegendre gauss_legendre(int n);

/// Composite Gauss-Legendre integral of f over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int points, int panels = 1);

}  // namespace amv
