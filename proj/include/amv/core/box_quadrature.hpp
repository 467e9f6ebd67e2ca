#pragma once

#include <vector>

#include "amv/core/common.hpp"

namespace amv {

/// Tensor composite Gauss-Legendre rule on a box (weights are Lebesgue).
class BoxQuadrature {
 public:
  BoxQuadrature(const Box& box, int panels_per_axis, int points_per_panel = 4);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  PointView node(std::size_t i) const { return {nodes_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
  double weight(std::size_t i) const { return weights_[i]; }
  const Box& box() const { return box_; }

 private:
  Box box_;
  int dim_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace amv
