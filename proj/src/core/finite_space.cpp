#include "amv/core/finite_space.hpp"

#include <cmath>

#include "amv/core/field.hpp"

namespace amv {

FiniteSpace::FiniteSpace(std::vector<Point> points, std::vector<double> masses, const Norm& norm)
    : points_(std::move(points)), masses_(std::move(masses)) {
  if (points_.size() != masses_.size()) throw ConfigError("finite space: point and mass counts differ");
  const std::size_t n = points_.size();
  dist_.resize(n, n);
  Point diff(norm.dim());
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(points_[i].size()) != norm.dim()) throw ConfigError("finite space: point dimension does not match the norm");
    dist_(i, i) = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      for (int a = 0; a < norm.dim(); ++a) diff[a] = points_[i][a] - points_[j][a];
      dist_(i, j) = dist_(j, i) = norm(diff);
    }
  }
  validate();
}

FiniteSpace::FiniteSpace(std::vector<double> masses, Eigen::MatrixXd distances)
    : masses_(std::move(masses)), dist_(std::move(distances)) {
  if (dist_.rows() != dist_.cols() || static_cast<std::size_t>(dist_.rows()) != masses_.size()) {
    throw ConfigError("finite space: distance matrix must be square and match the mass count");
  }
  validate();
}

void FiniteSpace::validate() const {
  if (masses_.empty()) throw ConfigError("finite space: no points");
  for (const double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("finite space: masses must be positive");
  }
  const auto n = dist_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) throw ConfigError("finite space: distance matrix needs a zero diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (dist_(i, j) != dist_(j, i)) throw ConfigError("finite space: distance matrix is not symmetric");
      if (!(dist_(i, j) >= 0.0)) throw ConfigError("finite space: negative distance");
    }
  }
}

FiniteSpace FiniteSpace::random(std::size_t count, int dim, std::uint64_t seed) {
  Rng rng(stream_seed(seed, {0x6669'6eULL, count, static_cast<std::uint64_t>(dim)}));
  std::vector<Point> pts(count, Point(dim));
  std::vector<double> masses(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < dim; ++a) pts[i][a] = rng.uniform();
    masses[i] = rng.uniform(0.5, 2.0);
  }
  return FiniteSpace(std::move(pts), std::move(masses), Norm::euclidean(dim));
}

FiniteSpace FiniteSpace::lattice_1d(std::size_t count, double spacing) {
  std::vector<Point> pts(count, Point(1));
  for (std::size_t i = 0; i < count; ++i) pts[i][0] = spacing * static_cast<double>(i);
  return FiniteSpace(std::move(pts), std::vector<double>(count, 1.0), Norm::euclidean(1));
}

double FiniteSpace::total_mass() const {
  CompensatedSum s;
  for (const double m : masses_) s.add(m);
  return s.value();
}

BallMembers FiniteSpace::ball_members(std::size_t i, double r) const {
  if (!(r > 0.0)) throw ConfigError("ball_members: radius must be positive");
  BallMembers out;
  CompensatedSum s;
  for (std::size_t j = 0; j < size(); ++j) {
    if (dist_(i, j) < r) {
      out.indices.push_back(j);
      s.add(masses_[j]);
    }
  }
  out.mass = s.value();
  return out;
}

double FiniteSpace::ball_mass(std::size_t i, double r) const {
  CompensatedSum s;
  for (std::size_t j = 0; j < size(); ++j) {
    if (dist_(i, j) < r) s.add(masses_[j]);
  }
  return s.value();
}

Eigen::VectorXd sample(const FiniteSpace& space, const ScalarField& f) {
  if (space.points().empty()) throw ConfigError("sample: space has no coordinates");
  Eigen::VectorXd v(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) v[i] = f(space.points()[i]);
  return v;
}

}  // namespace amv
