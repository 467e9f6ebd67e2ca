#pragma once

#include <string>
#include <vector>

#include "amv/cli/config.hpp"
#include "amv/cli/runner.hpp"
#include "amv/core/ball_quadrature.hpp"
#include "amv/core/field.hpp"
#include "amv/core/grid.hpp"
#include "amv/core/io.hpp"
#include "amv/core/weighted_euclidean.hpp"
#include "amv/operators/limits.hpp"
#include "amv/weighted/elliptic.hpp"

namespace amv::cli {

/// Shared state of one experiment. In dry mode the kind functions parse and
/// check everything and return before the expensive part.
class Context {
 public:
  Context(const ExperimentConfig& config, bool dry) : cfg(config), dry(dry) {}

  const ExperimentConfig& cfg;
  const bool dry;
  std::vector<ValidationIssue> issues;
  Record budget;
  Record results;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, CsvTable>> tables;

  void issue(const std::string& key, const std::string& message) { issues.push_back({key, message, false}); }
  void warn(const std::string& key, const std::string& message) { issues.push_back({key, message, true}); }
  void check(const std::string& name, bool pass, const std::string& detail) { assertions.push_back({name, pass, detail}); }
  void table(const std::string& name, CsvTable t) { tables.emplace_back(name, std::move(t)); }

  std::uint64_t seed(std::initializer_list<std::uint64_t> tags) const;

  /// Sample budget: integer >= minimum, recorded under budget.<key>.
  long count(const std::string& key, long fallback, long minimum = 1);

  ScalarField field(const std::string& key, const std::string& fallback = "") const;
  WeightField weight(const std::string& key, const std::string& fallback) const;
  Box box(const std::string& key, int dim, const std::string& fallback) const;
  Point point(const std::string& key, int dim, const Point& fallback) const;
  std::vector<Point> points(const std::string& key, int dim, const std::vector<Point>& fallback) const;

  int dim(int fallback = 2) const;
  /// space.box, space.norm, space.weight
  WeightedEuclidean space(const std::string& box_fallback = "0,1");
  Eigen::MatrixXd moment_matrix(const Norm& norm) const;
  /// quadrature.mode, quadrature.count
  BallQuadrature quadrature(const Norm& norm, const std::string& mode = "tensor_grid", long count = 4096);
  /// schedule.r0, schedule.ratio, schedule.count
  RadiiSchedule schedule(double r0, double ratio, int count) const;
  ExtrapolationModel model(const std::string& fallback) const;
  /// phi.rho and phi.center
  ScalarField bump(double rho, const Point& center) const;

  /// Issue when B_r(x) is not inside the box.
  void require_clearance(const WeightedEuclidean& space, PointView x, double r, const std::string& key);
  /// Issue when the support box of f grown by r leaves the domain.
  void require_support(const WeightedEuclidean& space, const ScalarField& f, double r, const std::string& key);
  /// Peclet check for D u'' + b u' on the grid; blocking only without upwinding.
  void peclet(const Grid& grid, const Eigen::MatrixXd& diffusion, const VectorFieldFn& drift, Upwinding upwind, const std::string& key);
};

using KindFn = void (*)(Context&);
KindFn kind_function(ExperimentKind kind);

std::string join(const std::vector<double>& v, const char* sep = ",");
std::string join(const std::vector<int>& v, const char* sep = ",");

}  // namespace amv::cli
