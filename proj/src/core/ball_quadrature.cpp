#include "amv/core/ball_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amv/core/quadrature1d.hpp"

namespace amv {

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "monte_carlo" || name == "mc") return SamplingMode::monte_carlo;
  if (name == "antithetic") return SamplingMode::antithetic;
  if (name == "tensor_grid" || name == "grid") return SamplingMode::tensor_grid;
  throw ConfigError("unknown sampling mode '" + std::string(name) + "'");
}

std::string to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::monte_carlo: return "monte_carlo";
    case SamplingMode::antithetic: return "antithetic";
    case SamplingMode::tensor_grid: return "tensor_grid";
  }
  return "?";
}

BallQuadrature::BallQuadrature(const Norm& norm, std::size_t count, SamplingMode mode, std::uint64_t seed)
    : norm_(norm), dim_(norm.dim()), mode_(mode), seed_(seed) {
  if (dim_ > kMaxDim) throw ConfigError("ball_quadrature: dimension above " + std::to_string(kMaxDim));
  if (count < 2) throw ConfigError("ball_quadrature: count must be at least 2");
  switch (mode) {
    case SamplingMode::monte_carlo:
      sample_rejection(count, false);
      break;
    case SamplingMode::antithetic:
      if (count % 2 != 0) throw ConfigError("ball_quadrature: antithetic mode needs an even count");
      sample_rejection(count, true);
      break;
    case SamplingMode::tensor_grid:
      if (dim_ == 2) {
        build_polar(count);
      } else {
        build_cells(count);
      }
      break;
  }
}

void BallQuadrature::sample_rejection(std::size_t count, bool antithetic) {
  const double c = norm_.bounding_half_width();
  const std::size_t draws = antithetic ? count / 2 : count;
  nodes_.reserve(count * dim_);
  Rng rng(stream_seed(seed_, {0x6261'6c6cULL, static_cast<std::uint64_t>(dim_)}));
  Scratch z;
  z.dim = dim_;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  while (accepted < draws) {
    for (int i = 0; i < dim_; ++i) z.data[i] = rng.uniform(-c, c);
    ++proposed;
    if (proposed >= 10000 && static_cast<double>(accepted) < 1e-3 * static_cast<double>(proposed)) {
      throw NumericalError("ball_quadrature: rejection acceptance below 1e-3 for norm " + norm_.descriptor());
    }
    if (!(norm_(z.view()) < 1.0)) continue;
    ++accepted;
    for (int i = 0; i < dim_; ++i) nodes_.push_back(z.data[i]);
    if (antithetic) {
      for (int i = 0; i < dim_; ++i) nodes_.push_back(-z.data[i]);
    }
  }
  weights_.assign(count, 1.0 / static_cast<double>(count));
  acceptance_ = static_cast<double>(accepted) / static_cast<double>(proposed);
  volume_ = acceptance_ * std::pow(2.0 * c, dim_);
}

void BallQuadrature::build_polar(std::size_t count) {
  const int radial = std::max(4, static_cast<int>(std::lround(std::sqrt(static_cast<double>(count)) / 2.5)));
  int angular = std::max(8, static_cast<int>(count / radial));
  angular += angular % 2;
  const auto gl = gauss_legendre(radial);
  const double dtheta = 2.0 * std::numbers::pi / angular;
  CompensatedSum total;
  for (int k = 0; k < angular / 2; ++k) {
    const double theta = (k + 0.5) * dtheta;
    const double e[2] = {std::cos(theta), std::sin(theta)};
    const double rho = 1.0 / norm_(PointView(e, 2));
    for (int j = 0; j < radial; ++j) {
      const double s = 0.5 * (1.0 + gl.nodes[j]);
      const double w = dtheta * rho * rho * s * 0.5 * gl.weights[j];
      const double z0 = rho * s * e[0];
      const double z1 = rho * s * e[1];
      nodes_.insert(nodes_.end(), {z0, z1, -z0, -z1});
      weights_.push_back(w);
      weights_.push_back(w);
      total.add(2.0 * w);
    }
  }
  volume_ = total.value();
  for (double& w : weights_) w /= volume_;
}

void BallQuadrature::build_cells(std::size_t count) {
  const double c = norm_.bounding_half_width();
  const double cube = std::pow(2.0 * c, dim_);
  // choose m so the number of cells inside the ball is close to count
  const double guess = std::pow(static_cast<double>(count) * cube / norm_.unit_ball_volume(), 1.0 / dim_);
  int m = std::max(2, static_cast<int>(std::lround(guess)));
  m += m % 2;
  const double h = 2.0 * c / m;
  std::vector<int> idx(dim_, 0);
  Scratch z;
  z.dim = dim_;
  std::size_t kept = 0;
  while (true) {
    for (int i = 0; i < dim_; ++i) z.data[i] = -c + (idx[i] + 0.5) * h;
    if (z.data[0] > 0.0 && norm_(z.view()) < 1.0) {
      for (int i = 0; i < dim_; ++i) nodes_.push_back(z.data[i]);
      for (int i = 0; i < dim_; ++i) nodes_.push_back(-z.data[i]);
      kept += 2;
    }
    int k = 0;
    while (k < dim_ && ++idx[k] == m) idx[k++] = 0;
    if (k == dim_) break;
  }
  if (kept == 0) throw NumericalError("ball_quadrature: tensor grid has no cell inside the ball");
  weights_.assign(kept, 1.0 / static_cast<double>(kept));
  volume_ = static_cast<double>(kept) * std::pow(h, dim_);
}

Eigen::VectorXd BallQuadrature::first_moment() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int a = 0; a < dim_; ++a) {
    CompensatedSum s;
    if (paired()) {
      for (std::size_t i = 0; i + 1 < size(); i += 2) s.add(weights_[i] * node(i)[a] + weights_[i + 1] * node(i + 1)[a]);
    } else {
      for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * node(i)[a]);
    }
    out[a] = s.value();
  }
  return out;
}

Eigen::MatrixXd BallQuadrature::second_moment() const {
  Eigen::MatrixXd out(dim_, dim_);
  for (int a = 0; a < dim_; ++a) {
    for (int b = a; b < dim_; ++b) {
      CompensatedSum s;
      for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * node(i)[a] * node(i)[b]);
      out(a, b) = out(b, a) = s.value();
    }
  }
  return out;
}

BallQuadrature BallQuadrature::nested(double fraction) const {
  std::size_t count = std::max<std::size_t>(16, static_cast<std::size_t>(static_cast<double>(size()) * fraction));
  count += count % 2;
  return BallQuadrature(norm_, count, mode_, stream_seed(seed_, {0x6e65'7374ULL}));
}

}  // namespace amv
