#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "amv/core/common.hpp"
#include "amv/core/field.hpp"
#include "amv/core/norm.hpp"

namespace amv {

struct BallMembers {
  std::vector<std::size_t> indices;
  double mass = 0.0;
};

/// Finitely many points with positive masses; every integral is an exact sum.
class FiniteSpace {
 public:
  /// Points in R^n with the metric induced by a norm.
  FiniteSpace(std::vector<Point> points, std::vector<double> masses, const Norm& norm);
  /// Abstract space given by a distance matrix.
  FiniteSpace(std::vector<double> masses, Eigen::MatrixXd distances);

  /// Uniform points in [0,1]^dim with masses uniform in [0.5, 2].
  static FiniteSpace random(std::size_t count, int dim, std::uint64_t seed);
  /// Points k * spacing on a line, unit masses.
  static FiniteSpace lattice_1d(std::size_t count, double spacing);

  std::size_t size() const { return masses_.size(); }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  double total_mass() const;
  double diameter() const { return dist_.maxCoeff(); }
  /// Coordinates when the space was built from points.
  const std::vector<Point>& points() const { return points_; }

  /// Open ball {j : d(x_j, x_i) < r} and its mass.
  BallMembers ball_members(std::size_t i, double r) const;
  /// mu(B_r(x_i)) without materialising the member list.
  double ball_mass(std::size_t i, double r) const;

 private:
  void validate() const;

  std::vector<Point> points_;
  std::vector<double> masses_;
  Eigen::MatrixXd dist_;
};

/// Samples a field at the points of a space.
Eigen::VectorXd sample(const FiniteSpace& space, const ScalarField& f);

}  // namespace amv
