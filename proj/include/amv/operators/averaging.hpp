#pragma once

#include <Eigen/Dense>
#include <utility>

#include "amv/core/ball_quadrature.hpp"
#include "amv/core/box_quadrature.hpp"
#include "amv/core/field.hpp"
#include "amv/core/finite_space.hpp"
#include "amv/core/weighted_euclidean.hpp"

namespace amv {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// ---- finite spaces: every operator is an exact finite sum ------------------

double average(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
double coaverage(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
double r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
double r_colaplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
double symmetrized_r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
/// (2/r) int_{r/2}^r A_t u(x) dt, integrated exactly (A_t is piecewise constant in t).
double refined_average(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x);
double energy_density(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r, std::size_t x);
double energy(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r);
double bracket(const FiniteSpace& space, const Eigen::VectorXd& f, const Eigen::VectorXd& g, double r, std::size_t x);
double density_deviation(const FiniteSpace& space, std::size_t x, std::size_t y, double r);
/// (int v Delta_r u, int u Delta_r^* v).
std::pair<double, double> green_pairing(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r);

/// Whole-space versions, index i holds the value at point i.
Eigen::VectorXd r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r);
Eigen::VectorXd r_colaplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r);
Eigen::VectorXd symmetrized_r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r);

/// Relative residuals of the exact identities; each is |lhs - rhs| divided
/// by the sum of the magnitudes of the terms involved.
struct IdentityResiduals {
  double green = 0.0;
  double product_rule = 0.0;
  double symmetrized_relation = 0.0;
  double energy_pairing = 0.0;
  double deviation = 0.0;
  double self_adjoint = 0.0;
  double max() const;
};

IdentityResiduals identity_residuals(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r);

// ---- weighted Euclidean domains: ball quadrature --------------------------
// Nodes are y_i = x + r z_i; w enters numerator and denominator, so every
// average is a ratio and the Hausdorff/Lebesgue constant cancels.

double average(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x);
Estimate average_with_error(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x);
double r_laplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x);
Estimate r_laplacian_with_error(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x);

/// A_r^*: the ball masses mu(B_r(y)) come from the `inner` rule.
double coaverage(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r, PointView x);
double r_colaplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r, PointView x);
double symmetrized_r_laplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r,
                               PointView x);

/// Composite Gauss-Legendre in t over [r/2, r] with the same ball rule for every A_t.
double refined_average(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x, int t_points = 8,
                       int t_panels = 1);
double energy_density(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& v, double r, PointView x);
double bracket(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, const ScalarField& g, double r, PointView x);
double density_deviation(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, PointView y, double r);

/// mu(B_r(x)) = J Leb(B) r^n sum_i lambda_i w(x + r z_i). With
/// `quadrature_volume` the unit-ball volume is the rule's own estimate.
double ball_mass(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, double r, bool quadrature_volume = false);

/// Delta_r^w f computed as (Delta_r(f w) - f Delta_r w) / A_r w on the unweighted space.
double weighted_laplacian_product_form(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, double r, PointView x);
/// Delta_r^w f computed as Delta_r f + <f, w>_r / A_r w on the unweighted space.
double weighted_laplacian_bracket_form(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, double r, PointView x);

/// int_K e_r(u,v) dmu over a box rule; u, v must vanish near the faces of K.
double energy(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& v, double r,
              const BoxQuadrature& region);
/// (int v Delta_r u dmu, int u Delta_r^* v dmu) over a box rule containing both supports.
std::pair<double, double> green_pairing(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u,
                                        const ScalarField& v, double r, const BoxQuadrature& region);

/// Throws DomainError unless the support box of f is inside the region.
void require_support_inside(const ScalarField& f, const Box& region);

}  // namespace amv
