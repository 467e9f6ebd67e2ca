#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "amv/core/multi_index.hpp"
#include "amv/core/norm.hpp"

namespace amv {

/// M_alpha = avg over the unit ball of y^alpha, for |alpha| <= order.
class MomentTensor {
 public:
  MomentTensor(Norm norm, int order) : norm_(std::move(norm)), order_(order) {}

  const Norm& norm() const { return norm_; }
  int order() const { return order_; }
  double operator()(const MultiIndex& alpha) const;
  double std_error(const MultiIndex& alpha) const;
  double max_std_error() const;
  void set(const MultiIndex& alpha, double value, double std_error = 0.0);
  /// Order-2 slice m_ij.
  Eigen::MatrixXd matrix() const;
  /// "analytic" or "monte_carlo".
  const std::string& method() const { return method_; }
  void set_method(std::string m) { method_ = std::move(m); }

 private:
  Norm norm_;
  int order_;
  std::map<MultiIndex, std::pair<double, double>> values_;
  std::string method_ = "analytic";
};

enum class MomentMethod { automatic, analytic, monte_carlo };

struct MomentOptions {
  MomentMethod method = MomentMethod::automatic;
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  /// Monte-Carlo path fails when a standard error exceeds this.
  double tolerance = 1e-2;
};

/// Closed forms: l^p balls (Dirichlet integrals, any p in [1, inf]) and
/// order <= 2 for quadratic norms; Monte-Carlo otherwise.
MomentTensor second_moment_tensor(const Norm& norm, int max_order, const MomentOptions& options = {});

/// avg over the l^p unit ball of y^alpha in closed form.
double lp_ball_moment(int n, double p, const MultiIndex& alpha);

}  // namespace amv
