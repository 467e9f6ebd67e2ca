#include "amv/core/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "amv/core/norm.hpp"
#include "amv/core/parse.hpp"

namespace amv {

Eigen::VectorXd FieldNode::gradient(PointView) const {
  throw ConfigError("field has no analytic gradient");
}

Eigen::MatrixXd FieldNode::hessian(PointView) const {
  throw ConfigError("field has no analytic Hessian");
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_num(v[i]);
  return s;
}

int dim_of(PointView x) { return static_cast<int>(x.size()); }

void require_dim(PointView x, int need) {
  if (dim_of(x) < need) throw ConfigError("field evaluated in dimension " + std::to_string(x.size()) + " but needs " + std::to_string(need));
}

class ConstantNode final : public FieldNode {
 public:
  explicit ConstantNode(double c) : c_(c) {}
  double value(PointView) const override { return c_; }
  Eigen::VectorXd gradient(PointView x) const override { return Eigen::VectorXd::Zero(dim_of(x)); }
  Eigen::MatrixXd hessian(PointView x) const override { return Eigen::MatrixXd::Zero(dim_of(x), dim_of(x)); }

 private:
  double c_;
};

class AffineNode final : public FieldNode {
 public:
  AffineNode(double b, std::vector<double> a) : b_(b), a_(std::move(a)) {}
  double value(PointView x) const override {
    require_dim(x, min_dim());
    double s = b_;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * x[i];
    return s;
  }
  Eigen::VectorXd gradient(PointView x) const override {
    require_dim(x, min_dim());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_of(x));
    for (std::size_t i = 0; i < a_.size(); ++i) g[i] = a_[i];
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override { return Eigen::MatrixXd::Zero(dim_of(x), dim_of(x)); }
  int min_dim() const override { return static_cast<int>(a_.size()); }

 private:
  double b_;
  std::vector<double> a_;
};

class SquaredNormNode final : public FieldNode {
 public:
  double value(PointView x) const override {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return s;
  }
  Eigen::VectorXd gradient(PointView x) const override {
    Eigen::VectorXd g(dim_of(x));
    for (int i = 0; i < dim_of(x); ++i) g[i] = 2.0 * x[i];
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    return 2.0 * Eigen::MatrixXd::Identity(dim_of(x), dim_of(x));
  }
};

// Re or Im of F = (x1 + i x2)^k. Partials: d1^a d2^b F = i^b k!/(k-a-b)! z^{k-a-b}.
class HarmonicNode final : public FieldNode {
 public:
  HarmonicNode(int k, bool im) : k_(k), im_(im) {}
  double value(PointView x) const override { return pick(partial(x, 0, 0)); }
  Eigen::VectorXd gradient(PointView x) const override {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_of(x));
    g[0] = pick(partial(x, 1, 0));
    g[1] = pick(partial(x, 0, 1));
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_of(x), dim_of(x));
    h(0, 0) = pick(partial(x, 2, 0));
    h(0, 1) = h(1, 0) = pick(partial(x, 1, 1));
    h(1, 1) = pick(partial(x, 0, 2));
    return h;
  }
  int min_dim() const override { return 2; }

 private:
  std::complex<double> partial(PointView x, int a, int b) const {
    require_dim(x, 2);
    const int order = a + b;
    if (order > k_) return {0.0, 0.0};
    double factor = 1.0;
    for (int j = 0; j < order; ++j) factor *= (k_ - j);
    std::complex<double> zp(1.0, 0.0);
    const std::complex<double> z(x[0], x[1]);
    for (int j = 0; j < k_ - order; ++j) zp *= z;
    std::complex<double> ib(1.0, 0.0);
    for (int j = 0; j < b; ++j) ib *= std::complex<double>(0.0, 1.0);
    return factor * ib * zp;
  }
  double pick(std::complex<double> c) const { return im_ ? c.imag() : c.real(); }

  int k_;
  bool im_;
};

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

class PolynomialNode final : public FieldNode {
 public:
  PolynomialNode(std::vector<std::vector<int>> e, std::vector<double> c) : e_(std::move(e)), c_(std::move(c)) {
    for (const auto& row : e_) dim_ = std::max(dim_, static_cast<int>(row.size()));
  }
  double value(PointView x) const override {
    require_dim(x, dim_);
    double s = 0.0;
    for (std::size_t k = 0; k < e_.size(); ++k) {
      double m = c_[k];
      for (std::size_t i = 0; i < e_[k].size(); ++i) m *= ipow(x[i], e_[k][i]);
      s += m;
    }
    return s;
  }
  Eigen::VectorXd gradient(PointView x) const override {
    require_dim(x, dim_);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_of(x));
    for (std::size_t k = 0; k < e_.size(); ++k) {
      for (std::size_t d = 0; d < e_[k].size(); ++d) {
        if (e_[k][d] == 0) continue;
        double m = c_[k] * e_[k][d];
        for (std::size_t i = 0; i < e_[k].size(); ++i) m *= ipow(x[i], e_[k][i] - (i == d ? 1 : 0));
        g[d] += m;
      }
    }
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    require_dim(x, dim_);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_of(x), dim_of(x));
    for (std::size_t k = 0; k < e_.size(); ++k) {
      const auto& ex = e_[k];
      for (std::size_t a = 0; a < ex.size(); ++a) {
        for (std::size_t b = a; b < ex.size(); ++b) {
          std::vector<int> red = ex;
          double m = c_[k];
          m *= red[a];
          red[a] -= 1;
          if (red[a] < 0) continue;
          m *= red[b];
          red[b] -= 1;
          if (red[b] < 0 || m == 0.0) continue;
          for (std::size_t i = 0; i < red.size(); ++i) m *= ipow(x[i], red[i]);
          h(a, b) += m;
          if (a != b) h(b, a) += m;
        }
      }
    }
    return h;
  }
  int min_dim() const override { return dim_; }

 private:
  std::vector<std::vector<int>> e_;
  std::vector<double> c_;
  int dim_ = 1;
};

class ExpLinearNode final : public FieldNode {
 public:
  explicit ExpLinearNode(std::vector<double> a) : a_(std::move(a)) {}
  double value(PointView x) const override {
    require_dim(x, min_dim());
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * x[i];
    return std::exp(s);
  }
  Eigen::VectorXd gradient(PointView x) const override { return value(x) * padded(dim_of(x)); }
  Eigen::MatrixXd hessian(PointView x) const override {
    const Eigen::VectorXd a = padded(dim_of(x));
    return value(x) * a * a.transpose();
  }
  int min_dim() const override { return static_cast<int>(a_.size()); }

 private:
  Eigen::VectorXd padded(int n) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < a_.size(); ++i) a[i] = a_[i];
    return a;
  }
  std::vector<double> a_;
};

class GaussNode final : public FieldNode {
 public:
  explicit GaussNode(double lambda) : lambda_(lambda) {}
  double value(PointView x) const override {
    double s = 0.0;
    for (const double v : x) s += v * v;
    return std::exp(-lambda_ * s);
  }
  Eigen::VectorXd gradient(PointView x) const override {
    const double f = value(x);
    Eigen::VectorXd g(dim_of(x));
    for (int i = 0; i < dim_of(x); ++i) g[i] = -2.0 * lambda_ * x[i] * f;
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    const double f = value(x);
    const int n = dim_of(x);
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) h(i, j) = f * (4.0 * lambda_ * lambda_ * x[i] * x[j] - (i == j ? 2.0 * lambda_ : 0.0));
    }
    return h;
  }

 private:
  double lambda_;
};

class ExpCosNode final : public FieldNode {
 public:
  double value(PointView x) const override {
    require_dim(x, 2);
    return std::exp(x[0]) * std::cos(x[1]);
  }
  Eigen::VectorXd gradient(PointView x) const override {
    require_dim(x, 2);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_of(x));
    const double e = std::exp(x[0]);
    g[0] = e * std::cos(x[1]);
    g[1] = -e * std::sin(x[1]);
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    require_dim(x, 2);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_of(x), dim_of(x));
    const double e = std::exp(x[0]);
    h(0, 0) = e * std::cos(x[1]);
    h(0, 1) = h(1, 0) = -e * std::sin(x[1]);
    h(1, 1) = -e * std::cos(x[1]);
    return h;
  }
  int min_dim() const override { return 2; }
};

class QuadPosNode final : public FieldNode {
 public:
  QuadPosNode(double c, std::vector<double> a) : c_(c), a_(std::move(a)) {}
  double value(PointView x) const override {
    require_dim(x, min_dim());
    double s = c_;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * x[i] * x[i];
    return s;
  }
  Eigen::VectorXd gradient(PointView x) const override {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_of(x));
    for (std::size_t i = 0; i < a_.size(); ++i) g[i] = 2.0 * a_[i] * x[i];
    return g;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_of(x), dim_of(x));
    for (std::size_t i = 0; i < a_.size(); ++i) h(i, i) = 2.0 * a_[i];
    return h;
  }
  int min_dim() const override { return static_cast<int>(a_.size()); }

 private:
  double c_;
  std::vector<double> a_;
};

class BumpNode final : public FieldNode {
 public:
  BumpNode(double rho, Point c) : rho_(rho), c_(std::move(c)) {}
  double value(PointView x) const override {
    const double g = 1.0 - q(x);
    return g > 0.0 ? g * g * g : 0.0;
  }
  Eigen::VectorXd gradient(PointView x) const override {
    const double g = 1.0 - q(x);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_of(x));
    if (g <= 0.0) return out;
    for (int i = 0; i < dim_of(x); ++i) out[i] = 3.0 * g * g * (-2.0 * (x[i] - c_[i]) / (rho_ * rho_));
    return out;
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    const int n = dim_of(x);
    const double g = 1.0 - q(x);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    if (g <= 0.0) return h;
    Eigen::VectorXd dg(n);
    for (int i = 0; i < n; ++i) dg[i] = -2.0 * (x[i] - c_[i]) / (rho_ * rho_);
    h = 6.0 * g * dg * dg.transpose();
    h.diagonal().array() += 3.0 * g * g * (-2.0 / (rho_ * rho_));
    return h;
  }
  int min_dim() const override { return static_cast<int>(c_.size()); }
  std::optional<Box> support() const override {
    Point lo(c_), hi(c_);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      lo[i] -= rho_;
      hi[i] += rho_;
    }
    return Box(lo, hi);
  }

 private:
  double q(PointView x) const {
    if (dim_of(x) != static_cast<int>(c_.size())) {
      throw ConfigError("bump: center dimension " + std::to_string(c_.size()) + " does not match point dimension " + std::to_string(x.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += (x[i] - c_[i]) * (x[i] - c_[i]);
    return s / (rho_ * rho_);
  }
  double rho_;
  Point c_;
};

class StepNode final : public FieldNode {
 public:
  StepNode(int axis, double t) : axis_(axis), t_(t) {}
  double value(PointView x) const override {
    require_dim(x, axis_ + 1);
    return x[axis_] > t_ ? 1.0 : 0.0;
  }
  bool has_gradient() const override { return false; }
  bool has_hessian() const override { return false; }
  int min_dim() const override { return axis_ + 1; }

 private:
  int axis_;
  double t_;
};

class CallableNode final : public FieldNode {
 public:
  CallableNode(std::function<double(PointView)> f, int dim) : f_(std::move(f)), dim_(dim) {}
  double value(PointView x) const override { return f_(x); }
  bool has_gradient() const override { return false; }
  bool has_hessian() const override { return false; }
  int min_dim() const override { return dim_; }

 private:
  std::function<double(PointView)> f_;
  int dim_;
};

class SumNode final : public FieldNode {
 public:
  SumNode(std::shared_ptr<const FieldNode> a, std::shared_ptr<const FieldNode> b, double sb) : a_(std::move(a)), b_(std::move(b)), sb_(sb) {}
  double value(PointView x) const override { return a_->value(x) + sb_ * b_->value(x); }
  Eigen::VectorXd gradient(PointView x) const override { return a_->gradient(x) + sb_ * b_->gradient(x); }
  Eigen::MatrixXd hessian(PointView x) const override { return a_->hessian(x) + sb_ * b_->hessian(x); }
  bool has_gradient() const override { return a_->has_gradient() && b_->has_gradient(); }
  bool has_hessian() const override { return a_->has_hessian() && b_->has_hessian(); }
  int min_dim() const override { return std::max(a_->min_dim(), b_->min_dim()); }
  std::optional<Box> support() const override {
    auto sa = a_->support();
    auto sb = b_->support();
    if (!sa || !sb) return std::nullopt;
    for (int i = 0; i < sa->dim(); ++i) {
      sa->lo[i] = std::min(sa->lo[i], sb->lo[i]);
      sa->hi[i] = std::max(sa->hi[i], sb->hi[i]);
    }
    return sa;
  }

 private:
  std::shared_ptr<const FieldNode> a_, b_;
  double sb_;
};

class ScaleNode final : public FieldNode {
 public:
  ScaleNode(std::shared_ptr<const FieldNode> a, double s) : a_(std::move(a)), s_(s) {}
  double value(PointView x) const override { return s_ * a_->value(x); }
  Eigen::VectorXd gradient(PointView x) const override { return s_ * a_->gradient(x); }
  Eigen::MatrixXd hessian(PointView x) const override { return s_ * a_->hessian(x); }
  bool has_gradient() const override { return a_->has_gradient(); }
  bool has_hessian() const override { return a_->has_hessian(); }
  int min_dim() const override { return a_->min_dim(); }
  std::optional<Box> support() const override { return a_->support(); }

 private:
  std::shared_ptr<const FieldNode> a_;
  double s_;
};

class ProductNode final : public FieldNode {
 public:
  ProductNode(std::shared_ptr<const FieldNode> a, std::shared_ptr<const FieldNode> b) : a_(std::move(a)), b_(std::move(b)) {}
  double value(PointView x) const override { return a_->value(x) * b_->value(x); }
  Eigen::VectorXd gradient(PointView x) const override {
    return a_->gradient(x) * b_->value(x) + a_->value(x) * b_->gradient(x);
  }
  Eigen::MatrixXd hessian(PointView x) const override {
    const Eigen::VectorXd ga = a_->gradient(x);
    const Eigen::VectorXd gb = b_->gradient(x);
    return a_->hessian(x) * b_->value(x) + a_->value(x) * b_->hessian(x) + ga * gb.transpose() + gb * ga.transpose();
  }
  bool has_gradient() const override { return a_->has_gradient() && b_->has_gradient(); }
  bool has_hessian() const override { return a_->has_hessian() && b_->has_hessian(); }
  int min_dim() const override { return std::max(a_->min_dim(), b_->min_dim()); }
  std::optional<Box> support() const override {
    auto sa = a_->support();
    auto sb = b_->support();
    if (!sa) return sb;
    if (!sb) return sa;
    for (int i = 0; i < sa->dim(); ++i) {
      sa->lo[i] = std::max(sa->lo[i], sb->lo[i]);
      sa->hi[i] = std::min(sa->hi[i], sb->hi[i]);
    }
    return sa;
  }

 private:
  std::shared_ptr<const FieldNode> a_, b_;
};

class ExpNode final : public FieldNode {
 public:
  ExpNode(std::shared_ptr<const FieldNode> a, double sign) : a_(std::move(a)), sign_(sign) {}
  double value(PointView x) const override { return std::exp(sign_ * a_->value(x)); }
  Eigen::VectorXd gradient(PointView x) const override { return value(x) * sign_ * a_->gradient(x); }
  Eigen::MatrixXd hessian(PointView x) const override {
    const Eigen::VectorXd g = sign_ * a_->gradient(x);
    return value(x) * (sign_ * a_->hessian(x) + g * g.transpose());
  }
  bool has_gradient() const override { return a_->has_gradient(); }
  bool has_hessian() const override { return a_->has_hessian(); }
  int min_dim() const override { return a_->min_dim(); }

 private:
  std::shared_ptr<const FieldNode> a_;
  double sign_;
};

}  // namespace

ScalarField::ScalarField(std::shared_ptr<const FieldNode> node, std::string descriptor)
    : node_(std::move(node)), descriptor_(std::move(descriptor)) {}

Eigen::VectorXd ScalarField::gradient(PointView x) const {
  if (!node_->has_gradient()) throw ConfigError("field '" + descriptor_ + "' has no analytic gradient");
  return node_->gradient(x);
}

Eigen::MatrixXd ScalarField::hessian(PointView x) const {
  if (!node_->has_hessian()) throw ConfigError("field '" + descriptor_ + "' has no analytic Hessian");
  return node_->hessian(x);
}

ScalarField ScalarField::constant(double c) { return {std::make_shared<ConstantNode>(c), "const:" + fmt_num(c)}; }

ScalarField ScalarField::affine(double offset, std::vector<double> a) {
  const std::string d = offset == 0.0 ? "linear:" + join(a) : "affine:" + fmt_num(offset) + "," + join(a);
  return {std::make_shared<AffineNode>(offset, std::move(a)), d};
}

ScalarField ScalarField::coordinate(int axis, int dim) {
  std::vector<double> a(dim, 0.0);
  a.at(axis) = 1.0;
  return {std::make_shared<AffineNode>(0.0, std::move(a)), "coord:" + std::to_string(axis)};
}

ScalarField ScalarField::squared_norm() { return {std::make_shared<SquaredNormNode>(), "sqnorm"}; }

ScalarField ScalarField::harmonic(int degree, bool imaginary) {
  if (degree < 0) throw ConfigError("harmonic: degree must be non-negative");
  return {std::make_shared<HarmonicNode>(degree, imaginary), std::string(imaginary ? "harmonic_im:" : "harmonic_re:") + std::to_string(degree)};
}

ScalarField ScalarField::polynomial(std::vector<std::vector<int>> exponents, std::vector<double> coefficients) {
  if (exponents.size() != coefficients.size()) throw ConfigError("polynomial: exponent and coefficient counts differ");
  std::string d = "poly:";
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    if (k) d += ";";
    d += fmt_num(coefficients[k]) + "*";
    for (std::size_t i = 0; i < exponents[k].size(); ++i) {
      if (exponents[k][i] < 0) throw ConfigError("polynomial: negative exponent");
      d += (i ? "." : "") + std::to_string(exponents[k][i]);
    }
  }
  if (exponents.size() == 1 && coefficients[0] == 1.0) {
    d = "monomial:";
    for (std::size_t i = 0; i < exponents[0].size(); ++i) d += (i ? "," : "") + std::to_string(exponents[0][i]);
  }
  return {std::make_shared<PolynomialNode>(std::move(exponents), std::move(coefficients)), d};
}

ScalarField ScalarField::exp_linear(std::vector<double> a) {
  const std::string d = "exp_linear:" + join(a);
  return {std::make_shared<ExpLinearNode>(std::move(a)), d};
}

ScalarField ScalarField::gaussian(double lambda) { return {std::make_shared<GaussNode>(lambda), "gauss:" + fmt_num(lambda)}; }

ScalarField ScalarField::exp_cos() { return {std::make_shared<ExpCosNode>(), "exp_cos"}; }

ScalarField ScalarField::quadratic_positive(double c, std::vector<double> a) {
  const std::string d = "quadpos:" + fmt_num(c) + "," + join(a);
  return {std::make_shared<QuadPosNode>(c, std::move(a)), d};
}

ScalarField ScalarField::bump(double rho, Point center) {
  if (!(rho > 0.0)) throw ConfigError("bump: radius must be positive");
  const std::string d = "bump:" + fmt_num(rho) + "," + join(center);
  return {std::make_shared<BumpNode>(rho, std::move(center)), d};
}

ScalarField ScalarField::step(int axis, double threshold) {
  if (axis < 0) throw ConfigError("step: axis must be non-negative");
  return {std::make_shared<StepNode>(axis, threshold), "step:" + std::to_string(axis) + "," + fmt_num(threshold)};
}

ScalarField ScalarField::from_callable(std::function<double(PointView)> f, std::string descriptor, int dim) {
  return {std::make_shared<CallableNode>(std::move(f), dim), std::move(descriptor)};
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
  return {std::make_shared<SumNode>(node_, o.node_, 1.0), descriptor_ + " + " + o.descriptor_};
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
  return {std::make_shared<SumNode>(node_, o.node_, -1.0), descriptor_ + " + -1@" + o.descriptor_};
}

ScalarField ScalarField::operator*(const ScalarField& o) const {
  return {std::make_shared<ProductNode>(node_, o.node_), descriptor_ + "*" + o.descriptor_};
}

ScalarField ScalarField::scaled(double factor) const {
  return {std::make_shared<ScaleNode>(node_, factor), fmt_num(factor) + "@" + descriptor_};
}

ScalarField ScalarField::exp_of(double sign) const {
  return {std::make_shared<ExpNode>(node_, sign), "exp(" + fmt_num(sign) + "*(" + descriptor_ + "))"};
}

double bump_integral(double rho, int dim) {
  // n omega_n rho^n int_0^1 (1 - s^2)^3 s^{n-1} ds = n omega_n rho^n B(n/2, 4) / 2
  const double n = dim;
  const double beta = std::exp(std::lgamma(0.5 * n) + std::lgamma(4.0) - std::lgamma(0.5 * n + 4.0));
  return n * omega(n) * std::pow(rho, n) * 0.5 * beta;
}

WeightField::WeightField(ScalarField field) : field_(std::move(field)) {
  const auto& d = field_.descriptor();
  constant_ = d.rfind("const:", 0) == 0 && d.find_first_of("+*@") == std::string::npos;
  if (constant_ && !(field_({0.0}) > 0.0)) throw ConfigError("weight '" + d + "' is not strictly positive");
}

void WeightField::check_positive_on(const Box& box, int per_axis) const {
  const int n = box.dim();
  std::vector<int> idx(n, 0);
  Point x(n);
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = box.lo[i] + box.width(i) * idx[i] / (per_axis - 1);
    const double v = field_(x);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("weight '" + descriptor() + "' is not strictly positive on the domain");
    }
    int k = 0;
    while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == n) break;
  }
}

namespace {

ScalarField parse_factor(const std::string& text) {
  const auto [head, args] = detail::split_head(text);
  const auto nums = [&, &args = args] { return detail::parse_doubles(args, "field '" + text + "'"); };
  const auto need = [&](std::size_t k) {
    const auto v = nums();
    if (v.size() < k) throw ConfigError("field '" + text + "' needs at least " + std::to_string(k) + " parameters");
    return v;
  };
  if (head == "const") return ScalarField::constant(need(1)[0]);
  if (head == "linear") return ScalarField::linear(need(1));
  if (head == "affine") {
    auto v = need(2);
    const double b = v.front();
    v.erase(v.begin());
    return ScalarField::affine(b, v);
  }
  if (head == "coord") {
    const long axis = detail::parse_long(args, "coord axis");
    std::vector<double> a(axis + 1, 0.0);
    a[axis] = 1.0;
    return ScalarField(ScalarField::linear(a));
  }
  if (head == "sqnorm") return ScalarField::squared_norm();
  if (head == "harmonic_re" || head == "harmonic_im") {
    return ScalarField::harmonic(static_cast<int>(detail::parse_long(args, "harmonic degree")), head == "harmonic_im");
  }
  if (head == "monomial") {
    std::vector<int> e;
    for (const double v : need(1)) {
      if (v < 0 || v != std::floor(v)) throw ConfigError("monomial exponents must be non-negative integers");
      e.push_back(static_cast<int>(v));
    }
    return ScalarField::monomial(e);
  }
  if (head == "exp_linear") return ScalarField::exp_linear(need(1));
  if (head == "gauss") return ScalarField::gaussian(need(1)[0]);
  if (head == "exp_cos") return ScalarField::exp_cos();
  if (head == "quadpos") {
    auto v = need(2);
    const double c = v.front();
    v.erase(v.begin());
    if (!(c > 0.0) || std::any_of(v.begin(), v.end(), [](double a) { return a < 0.0; })) {
      throw ConfigError("quadpos needs c > 0 and non-negative coefficients");
    }
    return ScalarField::quadratic_positive(c, v);
  }
  if (head == "bump") {
    auto v = need(2);
    const double rho = v.front();
    v.erase(v.begin());
    return ScalarField::bump(rho, v);
  }
  if (head == "step") {
    const auto v = need(2);
    return ScalarField::step(static_cast<int>(v[0]), v[1]);
  }
  throw ConfigError("unknown field descriptor '" + text + "'");
}

// Top-level '+' separates terms; a '+' right after an exponent marker belongs to a number.
std::vector<std::string> split_terms(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+' && !(i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E') && i > 1 && std::isdigit(static_cast<unsigned char>(s[i - 2])))) {
      out.push_back(detail::trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(detail::trim(s.substr(start)));
  return out;
}

}  // namespace

ScalarField make_field(std::string_view descriptor) {
  if (detail::trim(descriptor).empty()) throw ConfigError("empty field descriptor");
  std::optional<ScalarField> total;
  for (const auto& term : split_terms(descriptor)) {
    if (term.empty()) throw ConfigError("malformed field descriptor '" + std::string(descriptor) + "'");
    std::string body = term;
    double coef = 1.0;
    if (const auto at = body.find('@'); at != std::string::npos) {
      coef = detail::parse_double(body.substr(0, at), "field coefficient");
      body = body.substr(at + 1);
    }
    std::optional<ScalarField> prod;
    for (const auto& factor : detail::split(body, '*')) {
      const auto f = parse_factor(factor);
      prod = prod ? *prod * f : f;
    }
    const ScalarField t = coef == 1.0 ? *prod : prod->scaled(coef);
    total = total ? *total + t : t;
  }
  return *total;
}

WeightField make_weight(std::string_view descriptor) { return WeightField(make_field(descriptor)); }

std::vector<std::string> field_catalog() {
  return {"const:c", "linear:a1,..,an", "affine:b,a1,..,an", "coord:i", "sqnorm", "harmonic_re:k", "harmonic_im:k",
          "monomial:e1,..,en", "exp_linear:a1,..,an", "gauss:lambda", "exp_cos", "quadpos:c,a1,..,an",
          "bump:rho,c1,..,cn", "step:axis,threshold", "<coef>@<field>", "<field>*<field>", "<field> + <field>"};
}

std::vector<std::string> weight_catalog() {
  return {"const:c (c > 0)", "exp_linear:a1,..,an", "gauss:lambda", "quadpos:c,a1,..,an (c > 0, a_i >= 0)",
          "products of the above"};
}

std::vector<std::string> norm_catalog() { return {"lp:p (p >= 1)", "lp:inf", "euclidean", "sup", "quad:a11,a12,..,ann (SPD)"}; }

}  // namespace amv
