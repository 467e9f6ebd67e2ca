#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amv/core/common.hpp"

namespace amv {

/// Expression node behind a ScalarField. Implementations are immutable.
class FieldNode {
 public:
  virtual ~FieldNode() = default;
  virtual double value(PointView x) const = 0;
  virtual Eigen::VectorXd gradient(PointView x) const;
  virtual Eigen::MatrixXd hessian(PointView x) const;
  virtual bool has_gradient() const { return true; }
  virtual bool has_hessian() const { return true; }
  /// Smallest ambient dimension the expression makes sense in.
  virtual int min_dim() const { return 1; }
  /// Bounding box of the support, when compact.
  virtual std::optional<Box> support() const { return std::nullopt; }
};

/// A real function on R^n drawn from a closed-form catalog, with analytic
/// gradient and Hessian where the catalog entry provides them.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::shared_ptr<const FieldNode> node, std::string descriptor);

  double operator()(PointView x) const { return node_->value(x); }
  double operator()(std::initializer_list<double> x) const { return node_->value(PointView(x.begin(), x.size())); }
  Eigen::VectorXd gradient(PointView x) const;
  Eigen::MatrixXd hessian(PointView x) const;
  bool has_gradient() const { return node_->has_gradient(); }
  bool has_hessian() const { return node_->has_hessian(); }
  int min_dim() const { return node_->min_dim(); }
  std::optional<Box> support() const { return node_->support(); }
  const std::string& descriptor() const { return descriptor_; }
  bool valid() const { return node_ != nullptr; }

  // catalog
  static ScalarField constant(double c);
  static ScalarField affine(double offset, std::vector<double> coefficients);
  static ScalarField linear(std::vector<double> coefficients) { return affine(0.0, std::move(coefficients)); }
  static ScalarField coordinate(int axis, int dim);
  static ScalarField squared_norm();
  /// Re (x1 + i x2)^k or Im (x1 + i x2)^k.
  static ScalarField harmonic(int degree, bool imaginary);
  /// sum_k c_k x^{alpha_k}.
  static ScalarField polynomial(std::vector<std::vector<int>> exponents, std::vector<double> coefficients);
  static ScalarField monomial(std::vector<int> exponents) { return polynomial({std::move(exponents)}, {1.0}); }
  static ScalarField exp_linear(std::vector<double> coefficients);
  static ScalarField gaussian(double lambda);
  /// e^{x1} cos x2 (harmonic, not polynomial).
  static ScalarField exp_cos();
  /// c + sum_i a_i x_i^2.
  static ScalarField quadratic_positive(double c, std::vector<double> coefficients);
  /// Radial bump (1 - (|x - center| / rho)^2)^3_+ (C^2, compactly supported).
  static ScalarField bump(double rho, Point center);
  /// Indicator 1[x_axis > threshold]; value only.
  static ScalarField step(int axis, double threshold);
  /// Wraps a callable (value only), e.g. an interpolated grid function.
  static ScalarField from_callable(std::function<double(PointView)> f, std::string descriptor, int dim);

  // combinators
  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator-(const ScalarField& other) const;
  ScalarField operator*(const ScalarField& other) const;
  ScalarField scaled(double factor) const;
  /// exp(sign * f).
  ScalarField exp_of(double sign = 1.0) const;

 private:
  std::shared_ptr<const FieldNode> node_;
  std::string descriptor_;
};

/// Closed-form integral of ScalarField::bump(rho, .) over R^n.
double bump_integral(double rho, int dim);

/// Strictly positive field w with gradient (and Hessian where smooth).
class WeightField {
 public:
  WeightField() : field_(ScalarField::constant(1.0)) {}
  explicit WeightField(ScalarField field);

  double operator()(PointView x) const { return field_(x); }
  Eigen::VectorXd gradient(PointView x) const { return field_.gradient(x); }
  Eigen::MatrixXd hessian(PointView x) const { return field_.hessian(x); }
  const ScalarField& field() const { return field_; }
  const std::string& descriptor() const { return field_.descriptor(); }
  bool is_constant() const { return constant_; }

  /// Throws ConfigError unless w > 0 on a lattice covering the box.
  void check_positive_on(const Box& box, int per_axis = 21) const;

 private:
  ScalarField field_;
  bool constant_ = false;
};

/// Parses a field descriptor. Grammar:
///   field  := term ('+' term)*
///   term   := [coef '@'] factor ('*' factor)*
///   factor := const:c | linear:a1,.. | affine:b,a1,.. | coord:i | sqnorm
///           | harmonic_re:k | harmonic_im:k | monomial:e1,.. | exp_linear:a1,..
///           | gauss:lambda | exp_cos | quadpos:c,a1,.. | bump:rho,c1,..
///           | step:axis,threshold
ScalarField make_field(std::string_view descriptor);

/// make_field plus positivity/dimension checks appropriate for a weight.
WeightField make_weight(std::string_view descriptor);

/// Human-readable catalog listing used by `amvlab list-catalogs`.
std::vector<std::string> field_catalog();
std::vector<std::string> weight_catalog();
std::vector<std::string> norm_catalog();

}  // namespace amv
