#include "amv/core/box_quadrature.hpp"

#include "amv/core/quadrature1d.hpp"

namespace amv {

BoxQuadrature::BoxQuadrature(const Box& box, int panels_per_axis, int points_per_panel) : box_(box), dim_(box.dim()) {
  if (panels_per_axis < 1 || points_per_panel < 1) throw ConfigError("box quadrature: need at least one panel and one point");
  const auto gl = gauss_legendre(points_per_panel);
  const int m = panels_per_axis * points_per_panel;
  std::vector<std::vector<double>> x(dim_), w(dim_);
  for (int a = 0; a < dim_; ++a) {
    const double h = box.width(a) / panels_per_axis;
    for (int p = 0; p < panels_per_axis; ++p) {
      for (int i = 0; i < points_per_panel; ++i) {
        x[a].push_back(box.lo[a] + h * (p + 0.5 * (1.0 + gl.nodes[i])));
        w[a].push_back(0.5 * h * gl.weights[i]);
      }
    }
  }
  std::vector<int> idx(dim_, 0);
  while (true) {
    double wt = 1.0;
    for (int a = 0; a < dim_; ++a) {
      nodes_.push_back(x[a][idx[a]]);
      wt *= w[a][idx[a]];
    }
    weights_.push_back(wt);
    int a = 0;
    while (a < dim_ && ++idx[a] == m) idx[a++] = 0;
    if (a == dim_) break;
  }
}

}  // namespace amv
