#pragma once

#include <Eigen/Dense>
#include <vector>

#include "amv/core/ball_quadrature.hpp"
#include "amv/core/grid.hpp"
#include "amv/core/io.hpp"
#include "amv/core/weighted_euclidean.hpp"
#include "amv/operators/limits.hpp"
#include "amv/operators/profiles.hpp"
#include "amv/weighted/elliptic.hpp"

namespace amv {

struct PointConvergence {
  Point x;
  LimitEstimate limit;
  double reference = 0.0;
  double deviation = 0.0;
  /// |limit - reference| <= max(rel_tol |reference|, abs_floor)
  bool pass = false;
};

struct ConvergenceOptions {
  ExtrapolationModel model = ExtrapolationModel::even_powers;
  double rel_tol = 1e-2;
  double abs_floor = 1e-3;
  /// sub-grid for the discrete L^p deviation; empty box = skip
  Box lp_region;
  int lp_cells = 4;
};

struct ConvergenceReport {
  std::vector<PointConvergence> points;
  double p = 2.0;
  /// ||lim - L_w u||_p / max(||L_w u||_p, abs_floor) over the sub-grid
  double lp_relative_deviation = 0.0;
  bool pass = false;

  CsvTable table() const;
};

/// Extrapolated Delta_r^w u at each point against apply_Lw. The schedule
/// must fit inside the box around every point (DomainError otherwise).
ConvergenceReport convergence_check(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const std::vector<Point>& points,
                                    const RadiiSchedule& schedule, double p, const ConvergenceOptions& options = {});

struct WeakAmvProfile {
  std::vector<RadiusRow> rows;
  LimitEstimate limit;
  /// int phi dmu * sup|u|
  double scale = 0.0;
  double phi_mass = 0.0;
};

/// r -> int phi Delta_r^w u dmu by a composite Gauss rule on the bounding
/// box of supp phi (`panels` per axis, 4 points each).
WeakAmvProfile weak_amv_test(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& phi,
                             const RadiiSchedule& schedule, int panels = 8, double u_sup = -1.0);

/// int phi g dmu with the same box rule.
double pair_with_bump(const WeightedEuclidean& space, const ScalarField& phi, const ScalarField& g, int panels = 8);

struct AmvGridNorms {
  double l2 = 0.0;
  double sup = 0.0;
};

/// Discrete L^2 (root mean square) and sup of Delta_r^w u over the nodes of a
/// cells^n sub-grid of `region`.
AmvGridNorms amv_grid_norms(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const Box& region, int cells, double r);

struct CheegerComparison {
  GridFunction lw_solution;
  GridFunction cheeger_solution;
  WeakAmvProfile lw_profile;
  WeakAmvProfile cheeger_profile;
  /// int phi L_w u_cheeger dmu from central differences of the discrete solution
  double target = 0.0;
  std::vector<std::string> warnings;

  Record record() const;
};

struct CheegerOptions {
  int panels = 8;
  SolveOptions solve;
  Upwinding upwind = Upwinding::when_needed;
};

/// Euclidean norm, w = e^{-f}. Solves L_w u = 0 and Delta u - <grad f, grad u> = 0
/// with the same boundary data and pairs Delta_r^w of both with phi.
CheegerComparison amv_vs_cheeger_report(const Grid& grid, const ScalarField& f, const ScalarField& phi, const ScalarField& boundary,
                                        const BallQuadrature& quad, const RadiiSchedule& schedule, const CheegerOptions& options = {});

/// Gradient of a grid function at a node by central differences
/// (one-sided second order at faces).
Eigen::VectorXd grid_gradient(const GridFunction& u, std::size_t node);

}  // namespace amv
