#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "amv/core/common.hpp"
#include "amv/core/norm.hpp"

namespace amv {

enum class SamplingMode { monte_carlo, antithetic, tensor_grid };

SamplingMode parse_sampling_mode(std::string_view name);
std::string to_string(SamplingMode mode);

/// Nodes z_i in the open unit ball of a norm with weights summing to one.
///
/// monte_carlo: i.i.d. uniform nodes by rejection from the bounding cube.
/// antithetic:  as monte_carlo, stored as adjacent pairs (z, -z).
/// tensor_grid: deterministic product rule. In the plane this is a polar
///              rule (Gauss-Legendre in the radius, trapezoid in the angle);
///              otherwise cell-centred cubes whose centres lie in the ball.
///              Both are stored as antipodal pairs.
class BallQuadrature {
 public:
  BallQuadrature(const Norm& norm, std::size_t count, SamplingMode mode, std::uint64_t seed);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  PointView node(std::size_t i) const { return {nodes_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  SamplingMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  const Norm& norm() const { return norm_; }
  /// True when nodes come in adjacent (z, -z) pairs with equal weights.
  bool paired() const { return mode_ != SamplingMode::monte_carlo; }

  /// Accepted / proposed samples in the rejection step (1 for tensor grids).
  double acceptance_rate() const { return acceptance_; }
  /// Lebesgue volume of the unit ball implied by the construction.
  double volume_estimate() const { return volume_; }

  /// sum_i lambda_i z_i, summed pairwise so that paired rules give exact zeros.
  Eigen::VectorXd first_moment() const;
  /// sum_i lambda_i z_i z_i^T.
  Eigen::MatrixXd second_moment() const;

  /// Same mode and norm with roughly count * fraction nodes and a derived seed.
  BallQuadrature nested(double fraction) const;

 private:
  void sample_rejection(std::size_t count, bool antithetic);
  void build_polar(std::size_t count);
  void build_cells(std::size_t count);

  Norm norm_;
  int dim_;
  SamplingMode mode_;
  std::uint64_t seed_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double acceptance_ = 1.0;
  double volume_ = 0.0;
};

}  // namespace amv
