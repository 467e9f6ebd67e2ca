#pragma once

#include <string>
#include <vector>

#include "amv/core/ball_quadrature.hpp"
#include "amv/core/finite_space.hpp"
#include "amv/core/io.hpp"
#include "amv/core/weighted_euclidean.hpp"
#include "amv/heisenberg/h1.hpp"
#include "amv/operators/averaging.hpp"
#include "amv/operators/limits.hpp"

namespace amv {

/// Model space data for the curvature-dimension pair (K, N).
class ComparisonProfile {
 public:
  ComparisonProfile(double k, double n);

  double k() const { return k_; }
  double n() const { return n_; }
  /// pi sqrt((N-1)/K) for K > 0, infinity otherwise.
  double max_radius() const;
  /// t, sqrt((N-1)/K) sin(t sqrt(K/(N-1))) or the sinh analogue.
  double s(double t) const;
  /// N omega_N int_0^r s(t)^{N-1} dt; closed form for K = 0.
  double v(double r) const;

 private:
  double k_, n_;
};

double s_kn(double k, double n, double t);
double v_kn(double k, double n, double r);

/// theta^N_r = mu(B_r(x)) / (omega_N r^N).
Estimate bg_density(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, double r, double n);
double bg_density(const FiniteSpace& space, std::size_t x, double r, double n);
/// Haar measure with the Koranyi gauge: (pi^2/2) r^4 / (omega_N r^N).
double bg_density_h1(double r, double n);

struct BgRow {
  double radius = 0.0;
  double mass = 0.0;
  double comparison = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
};

struct BgMonotonicity {
  /// increasing radius
  std::vector<BgRow> rows;
  /// ratio(r_{j+1}) <= ratio(r_j) + 3 stderr for every step
  bool non_increasing = true;
  bool strictly_decreasing = true;
  /// max |ratio - ratio(r_min)|
  double spread = 0.0;
  std::string verdict() const;
  CsvTable table() const;
};

BgMonotonicity bg_monotonicity_check(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, const ComparisonProfile& profile,
                                     const RadiiSchedule& schedule);

struct BoundFit {
  /// N omega_N (-K) / (6 (N+2)): the r^{N+2} Taylor coefficient of v
  double leading = 0.0;
  /// max over the probe radii of (v(r) - omega_N r^N) / r^{N+2}
  double fitted = 0.0;
  /// v(r) <= omega_N r^N + fitted r^{N+2} on a dense grid of (0, r_max]
  bool holds = false;
  double worst_slack = 0.0;
};

/// v_{K,N}(r) <= omega_N r^N + C r^{N+2} for r <= r_max.
BoundFit comparison_bound_fit(const ComparisonProfile& profile, double r_max, int probes = 12, int dense = 2000);

enum class MmVerdict { vanishing, non_vanishing, inconclusive };
std::string to_string(MmVerdict v);

struct MmRow {
  double radius = 0.0;
  /// int phi (1 - theta_r) / r dmu
  double pairing = 0.0;
  double pairing_std_error = 0.0;
  /// int_{supp phi} |1 - theta_r| / r dmu
  double total_variation = 0.0;
};

struct MmBoundaryReport {
  std::vector<MmRow> rows;
  /// r * pairing extrapolated to r = 0
  LimitEstimate rescaled_limit;
  /// int phi (1 - J w) dmu with J = hausdorff ratio (first-order Taylor term)
  double predicted_rescaled_limit = 0.0;
  /// T(r_min) / T(r_max)
  double total_variation_growth = 0.0;
  MmVerdict verdict = MmVerdict::inconclusive;

  CsvTable table() const;
  Record record() const;
};

/// Defect of the Bishop-Gromov density against phi along the schedule.
/// `panels` sets the composite Gauss rule on the bounding box of supp phi.
MmBoundaryReport mm_boundary_defect(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& phi, const RadiiSchedule& schedule,
                                    int panels = 6);

struct HausdorffRatio {
  /// omega_n / Leb(unit ball)
  double candidate = 0.0;
  /// constant c for which c * Lebesgue has vanishing defect, from a two-point sweep
  double empirical = 0.0;
  double empirical_std_error = 0.0;
  bool agree = false;
  Record record() const;
};

/// The sweep samples the unit ball by rejection (`count` points).
HausdorffRatio norm_hausdorff_ratio(const Norm& norm, std::size_t count = 1000000, std::uint64_t seed = 1);

}  // namespace amv
