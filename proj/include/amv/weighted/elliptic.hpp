#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "amv/core/field.hpp"
#include "amv/core/grid.hpp"

namespace amv {

/// L_w u = 1/2 tr(M Hess u) + <grad w / w, M grad u>.
double apply_Lw(const ScalarField& u, const WeightField& w, const Eigen::MatrixXd& m, PointView x);

enum class Upwinding { never, when_needed, always };

Upwinding parse_upwinding(const std::string& name);

/// Discretization of sum_ab D_ab d_a d_b u + <b(x), grad u> = f with
/// Dirichlet rows on the faces of the grid.
struct EllipticSystem {
  Grid grid;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd diffusion;
  /// max over nodes of |b|_inf h / lambda_min(D)
  double max_peclet = 0.0;
  std::size_t upwinded_nodes = 0;
  std::size_t interior_rows = 0;
  /// interior rows with |a_ii| >= sum_{j != i} |a_ij|
  std::size_t dominant_rows = 0;
  std::vector<std::string> warnings;
};

using VectorFieldFn = std::function<Eigen::VectorXd(PointView)>;

/// Central second differences (4-point cross stencil for D_ab, a != b),
/// central drift differences, first-order upwinding per `upwind`.
EllipticSystem assemble_elliptic(const Grid& grid, const Eigen::MatrixXd& diffusion, const VectorFieldFn& drift, const ScalarField& source,
                                 const ScalarField& boundary, Upwinding upwind = Upwinding::when_needed);

/// L_w u = rhs, assembled in the rescaled form
/// tr(M Hess u) + <(2/w) M grad w, grad u> = 2 rhs.
EllipticSystem assemble_dirichlet(const Grid& grid, const WeightField& w, const Eigen::MatrixXd& m, const ScalarField& rhs, const ScalarField& boundary,
                                  Upwinding upwind = Upwinding::when_needed);

enum class SolverKind { automatic, direct, bicgstab };

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  SolverKind solver = SolverKind::automatic;
  /// automatic picks the direct solver up to this many unknowns (200^2 grid)
  std::size_t direct_limit = 201 * 201;
};

struct SolveReport {
  GridFunction solution;
  /// ||b - A x|| / ||b||
  double relative_residual = 0.0;
  int iterations = 0;
  std::string method;
  std::vector<double> history;
};

/// Sparse LU, or BiCGStab with a Jacobi preconditioner. Throws NumericalError
/// (with the residual history in the message) when tol is not reached.
SolveReport solve_dirichlet(const EllipticSystem& system, const SolveOptions& options = {});

struct BicgstabResult {
  Eigen::VectorXd x;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;
};

BicgstabResult bicgstab(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0, double tol,
                        int max_iter);

/// Delta u - <grad f, grad u> = rhs with u = boundary on the faces.
SolveReport cheeger_drift_solve(const Grid& grid, const ScalarField& f, const ScalarField& boundary, const ScalarField& rhs = ScalarField::constant(0.0),
                                const SolveOptions& options = {}, Upwinding upwind = Upwinding::when_needed);

}  // namespace amv
