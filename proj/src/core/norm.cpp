#include "amv/core/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "amv/core/parse.hpp"

namespace amv {

double omega(double s) { return std::pow(M_PI, 0.5 * s) / std::tgamma(0.5 * s + 1.0); }

Norm Norm::lp(int dim, double p) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("norm: dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (!(p >= 1.0)) throw ConfigError("norm: l^p exponent must satisfy p >= 1");
  Norm n;
  n.kind_ = Kind::lp;
  n.dim_ = dim;
  n.p_ = p;
  n.extent_.assign(dim, 1.0);
  return n;
}

Norm Norm::sup(int dim) { return lp(dim, std::numeric_limits<double>::infinity()); }

Norm Norm::quadratic(const Eigen::MatrixXd& matrix) {
  const auto dim = static_cast<int>(matrix.rows());
  if (dim < 1 || dim > kMaxDim || matrix.cols() != matrix.rows()) {
    throw ConfigError("norm: quadratic form must be a square matrix of dimension 1.." + std::to_string(kMaxDim));
  }
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, matrix.cwiseAbs().maxCoeff())) {
    throw ConfigError("norm: quadratic form is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) throw ConfigError("norm: quadratic form is not positive definite");
  Norm n;
  n.kind_ = Kind::quadratic;
  n.dim_ = dim;
  n.matrix_ = 0.5 * (matrix + matrix.transpose());
  const Eigen::MatrixXd inv = n.matrix_.inverse();
  n.extent_.resize(dim);
  for (int i = 0; i < dim; ++i) n.extent_[i] = std::sqrt(inv(i, i));
  return n;
}

bool Norm::is_sup() const { return kind_ == Kind::lp && std::isinf(p_); }

double Norm::operator()(PointView x) const {
  if (kind_ == Kind::quadratic) {
    double q = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim_; ++j) row += matrix_(i, j) * x[j];
      q += x[i] * row;
    }
    if (q > 1e-280 || q == 0.0 && std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return std::sqrt(std::max(q, 0.0));
    // rescale tiny vectors
    double m = 0.0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x[i]));
    Scratch y;
    y.dim = dim_;
    for (int i = 0; i < dim_; ++i) y.data[i] = x[i] / m;
    return m * (*this)(y.view());
  }
  if (p_ == 2.0) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += x[i] * x[i];
    if (s > 1e-280 || s == 0.0 && std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return std::sqrt(s);
  }
  if (p_ == 1.0) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::abs(x[i]);
    return s;
  }
  double m = 0.0;
  for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x[i]));
  if (std::isinf(p_) || m == 0.0) return m;
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(x[i]) / m, p_);
  return m * std::pow(s, 1.0 / p_);
}

double Norm::bounding_half_width() const { return *std::max_element(extent_.begin(), extent_.end()); }

double Norm::unit_ball_volume() const {
  if (kind_ == Kind::quadratic) return omega(dim_) / std::sqrt(matrix_.determinant());
  if (std::isinf(p_)) return std::pow(2.0, dim_);
  // Dirichlet's integral: (2 Gamma(1 + 1/p))^n / Gamma(1 + n/p).
  return std::exp(dim_ * std::log(2.0 * std::tgamma(1.0 + 1.0 / p_)) - std::lgamma(1.0 + dim_ / p_));
}

std::string Norm::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::lp) {
    if (std::isinf(p_)) {
      os << "lp:inf";
    } else {
      os << "lp:" << p_;
    }
    return os.str();
  }
  os << "quad:";
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) os << (i + j == 0 ? "" : ",") << matrix_(i, j);
  }
  return os.str();
}

Norm make_norm(std::string_view descriptor, int dim) {
  const auto [head, args] = detail::split_head(descriptor);
  if (head == "euclidean") return Norm::euclidean(dim);
  if (head == "sup") return Norm::sup(dim);
  if (head == "lp") return Norm::lp(dim, detail::parse_double(args, "norm exponent"));
  if (head == "quad") {
    const auto v = detail::parse_doubles(args, "quadratic norm entries");
    if (static_cast<int>(v.size()) != dim * dim) {
      throw ConfigError("norm: quad descriptor needs " + std::to_string(dim * dim) + " entries");
    }
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = v[i * dim + j];
    }
    return Norm::quadratic(a);
  }
  throw ConfigError("unknown norm descriptor '" + std::string(descriptor) + "'");
}

}  // namespace amv
