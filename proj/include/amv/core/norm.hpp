#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

#include "amv/core/common.hpp"

namespace amv {

/// A norm on R^n: either an l^p norm (p in [1, inf]) or x -> sqrt(x^T A x)
/// for a symmetric positive-definite A.
class Norm {
 public:
  enum class Kind { lp, quadratic };

  static Norm lp(int dim, double p);
  static Norm euclidean(int dim) { return lp(dim, 2.0); }
  static Norm sup(int dim);
  static Norm quadratic(const Eigen::MatrixXd& matrix);

  double operator()(PointView x) const;

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  /// Exponent of an l^p norm; +inf for the max norm.
  double p() const { return p_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  bool is_euclidean() const { return kind_ == Kind::lp && p_ == 2.0; }
  bool is_sup() const;

  /// max |z_i| over the closed unit ball.
  double axis_extent(int axis) const { return extent_[axis]; }
  /// Half-width c of the bounding cube [-c, c]^n of the unit ball.
  double bounding_half_width() const;
  /// Lebesgue volume of the unit ball (closed form for every supported kind).
  double unit_ball_volume() const;

  /// Catalog descriptor, e.g. "lp:4", "lp:inf", "quad:4,0,0,1".
  std::string descriptor() const;

 private:
  Norm() = default;

  Kind kind_ = Kind::lp;
  int dim_ = 0;
  double p_ = 2.0;
  Eigen::MatrixXd matrix_;
  std::vector<double> extent_;
};

/// Parses a norm descriptor for R^dim. Accepted forms: "lp:<p>" with p >= 1 or
/// "inf", "euclidean", "sup", and "quad:<a11>,<a12>,...,<ann>" (row-major).
Norm make_norm(std::string_view descriptor, int dim);

/// Volume of the Euclidean unit ball in R^s, pi^{s/2} / Gamma(s/2 + 1), for real s >= 0.
double omega(double s);

}  // namespace amv
