#include "amv/weighted/moments.hpp"

#include <cmath>

#include "amv/core/ball_quadrature.hpp"

namespace amv {

double MomentTensor::operator()(const MultiIndex& alpha) const {
  const auto it = values_.find(alpha);
  if (it == values_.end()) throw ConfigError("moment of order " + std::to_string(total_degree(alpha)) + " not computed");
  return it->second.first;
}

double MomentTensor::std_error(const MultiIndex& alpha) const {
  const auto it = values_.find(alpha);
  return it == values_.end() ? 0.0 : it->second.second;
}

double MomentTensor::max_std_error() const {
  double m = 0.0;
  for (const auto& [k, v] : values_) m = std::max(m, v.second);
  return m;
}

void MomentTensor::set(const MultiIndex& alpha, double value, double std_error) { values_[alpha] = {value, std_error}; }

Eigen::MatrixXd MomentTensor::matrix() const {
  const int n = norm_.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      MultiIndex a(n, 0);
      a[i] += 1;
      a[j] += 1;
      m(i, j) = (*this)(a);
    }
  }
  return m;
}

double lp_ball_moment(int n, double p, const MultiIndex& alpha) {
  for (const int a : alpha) {
    if (a % 2 != 0) return 0.0;
  }
  if (std::isinf(p)) {
    double v = 1.0;
    for (const int a : alpha) v *= 1.0 / (a + 1.0);
    return v;
  }
  // int_{B_p} y^alpha = 2^n prod Gamma((a_i+1)/p) / (p^n Gamma((|a|+n)/p + 1)); divide by the volume (alpha = 0)
  double lg = 0.0;
  for (const int a : alpha) lg += std::lgamma((a + 1.0) / p) - std::lgamma(1.0 / p);
  const int k = total_degree(alpha);
  lg += std::lgamma(n / p + 1.0) - std::lgamma((k + n) / p + 1.0);
  return std::exp(lg);
}

MomentTensor second_moment_tensor(const Norm& norm, int max_order, const MomentOptions& options) {
  if (max_order < 2) throw ConfigError("second_moment_tensor: max_order must be at least 2");
  const int n = norm.dim();
  MomentTensor t(norm, max_order);
  const bool analytic_ok = norm.kind() == Norm::Kind::lp || max_order <= 2;
  MomentMethod method = options.method;
  if (method == MomentMethod::automatic) method = analytic_ok ? MomentMethod::analytic : MomentMethod::monte_carlo;
  if (method == MomentMethod::analytic && !analytic_ok) {
    throw ConfigError("second_moment_tensor: no closed form for quadratic norms above order 2");
  }
  const auto all = graded_multi_indices(n, max_order);
  if (method == MomentMethod::analytic) {
    if (norm.kind() == Norm::Kind::lp) {
      for (const auto& a : all) t.set(a, lp_ball_moment(n, norm.p(), a));
    } else {
      // y = A^{-1/2} x maps the Euclidean ball onto the quadratic ball
      const Eigen::MatrixXd minv = norm.matrix().inverse() / (n + 2.0);
      for (const auto& a : all) {
        const int k = total_degree(a);
        double v = 0.0;
        if (k == 0) {
          v = 1.0;
        } else if (k == 2) {
          int i = -1, j = -1;
          for (int c = 0; c < n; ++c) {
            for (int m = 0; m < a[c]; ++m) (i < 0 ? i : j) = c;
          }
          v = minv(i, j);
        }
        t.set(a, v);
      }
    }
    t.set_method("analytic");
    return t;
  }
  const BallQuadrature q(norm, options.samples, SamplingMode::monte_carlo, options.seed);
  const auto count = static_cast<double>(q.size());
  for (const auto& a : all) {
    CompensatedSum s, s2;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double m = 1.0;
      const auto z = q.node(i);
      for (int c = 0; c < n; ++c) {
        for (int e = 0; e < a[c]; ++e) m *= z[c];
      }
      s.add(m);
      s2.add(m * m);
    }
    const double mean = s.value() / count;
    const double var = std::max(0.0, s2.value() / count - mean * mean);
    const double se = std::sqrt(var / (count - 1.0));
    if (se > options.tolerance) {
      throw NumericalError("second_moment_tensor: standard error " + std::to_string(se) + " above tolerance");
    }
    t.set(a, mean, se);
  }
  t.set_method("monte_carlo");
  return t;
}

}  // namespace amv
