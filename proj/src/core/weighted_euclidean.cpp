#include "amv/core/weighted_euclidean.hpp"

#include <algorithm>
#include <limits>

namespace amv {

WeightedEuclidean::WeightedEuclidean(Box box, Norm norm, WeightField weight)
    : box_(std::move(box)), norm_(std::move(norm)), weight_(std::move(weight)) {
  if (box_.dim() != norm_.dim()) throw ConfigError("weighted space: box and norm dimensions differ");
  if (weight_.field().min_dim() > box_.dim()) throw ConfigError("weight '" + weight_.descriptor() + "' needs a higher dimension");
  weight_.check_positive_on(box_);
  hausdorff_ratio_ = omega(dim()) / norm_.unit_ball_volume();
}

double WeightedEuclidean::clearance(PointView x) const {
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) {
    c = std::min(c, std::min(x[i] - box_.lo[i], box_.hi[i] - x[i]) / norm_.axis_extent(i));
  }
  return c;
}

void WeightedEuclidean::require_ball(PointView x, double r) const {
  if (r > clearance(x) * (1.0 + 1e-12)) {
    std::string where;
    for (std::size_t i = 0; i < x.size(); ++i) where += (i ? "," : "") + std::to_string(x[i]);
    throw DomainError("ball of radius " + std::to_string(r) + " at (" + where + ") leaves the domain");
  }
}

std::string WeightedEuclidean::descriptor() const { return norm_.descriptor() + " w=" + weight_.descriptor(); }

}  // namespace amv
