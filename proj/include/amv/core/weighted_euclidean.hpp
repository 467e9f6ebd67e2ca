#pragma once

#include <string>

#include "amv/core/common.hpp"
#include "amv/core/field.hpp"
#include "amv/core/norm.hpp"

namespace amv {

/// (Omega, ||.||, w dH^n) on a box Omega. H^n is J * Lebesgue with
/// J = omega_n / Leb(unit ball); averages never depend on J.
class WeightedEuclidean {
 public:
  enum class VolumeSource { analytic, quadrature };

  WeightedEuclidean(Box box, Norm norm, WeightField weight = WeightField());

  const Box& box() const { return box_; }
  const Norm& norm() const { return norm_; }
  const WeightField& weight() const { return weight_; }
  int dim() const { return box_.dim(); }
  double hausdorff_ratio() const { return hausdorff_ratio_; }
  VolumeSource volume_source() const { return VolumeSource::analytic; }

  /// Largest r with the closed ball B_r(x) inside the box.
  double clearance(PointView x) const;
  /// Throws DomainError when B_r(x) leaves the box.
  void require_ball(PointView x, double r) const;

  /// Same box and norm with w = 1.
  WeightedEuclidean unweighted() const { return {box_, norm_, WeightField()}; }

  std::string descriptor() const;

 private:
  Box box_;
  Norm norm_;
  WeightField weight_;
  double hausdorff_ratio_;
};

}  // namespace amv
