#pragma once

#include <Eigen/Dense>
#include <vector>

#include "amv/core/io.hpp"
#include "amv/operators/averaging.hpp"
#include "amv/operators/limits.hpp"

namespace amv {

struct RadiusRow {
  double radius = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// (radius, value, stderr) table.
CsvTable radius_table(const std::vector<RadiusRow>& rows);

struct AmvNormProfile {
  std::vector<RadiusRow> rows;
  /// max over the last third of the ladder; an estimate of the limsup.
  double limsup = 0.0;
};

/// Normalized ||Delta_r u||_{L^p(K)} (mean over K for finite p, max for p = inf)
/// at every radius of the schedule.
AmvNormProfile amv_norm_profile(const FiniteSpace& space, const Eigen::VectorXd& u, double p, const std::vector<std::size_t>& region,
                                const RadiiSchedule& schedule);
AmvNormProfile amv_norm_profile(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double p, const Box& region,
                                const RadiiSchedule& schedule, int panels = 6);

/// sup over r = R 2^{-j}, j = 0..levels, of avg_{B_r(x)} |u - u_{B_r(x)}|.
double sharp_maximal(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double big_r, PointView x, int levels = 12);
double sharp_maximal(const FiniteSpace& space, const Eigen::VectorXd& u, double big_r, std::size_t x, int levels = 12);
/// sup over the same radii of avg_{B_r(x)} g.
double restricted_maximal(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& g, double big_r, PointView x, int levels = 12);
double restricted_maximal(const FiniteSpace& space, const Eigen::VectorXd& g, double big_r, std::size_t x, int levels = 12);

/// Smallest C for which |u^r(x) - u^r(y)| <= C d/r (avg_{B_2r(x)}|u-c| + avg_{B_2r(y)}|u-c|) holds at this pair.
double hajlasz_ratio(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, PointView x, PointView y, double r, double c,
                     int t_points = 8, int t_panels = 2);

struct HajlaszSweep {
  std::vector<double> radii;
  /// max over the sampled pairs of hajlasz_ratio at each radius
  std::vector<double> constants;
  /// max / min of the per-radius constants
  double spread = 0.0;
  CsvTable table() const;
};

/// For each radius: `pairs` points x drawn uniformly from `region` scaled by r
/// along the first axis (|x1 - center| <= r), partners y = x + (d_fraction r) e_theta,
/// and c = A_{3r} u(x).
HajlaszSweep hajlasz_constant(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const std::vector<double>& radii,
                              const Box& region, int pairs, std::uint64_t seed, double d_fraction = 0.5);

}  // namespace amv
