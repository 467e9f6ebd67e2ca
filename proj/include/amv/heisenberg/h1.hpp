#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amv/core/field.hpp"
#include "amv/core/io.hpp"
#include "amv/operators/averaging.hpp"
#include "amv/operators/limits.hpp"
#include "amv/operators/profiles.hpp"

namespace amv {

/// Point of the first Heisenberg group in exponential coordinates (x, y, t).
struct H1Point {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  Point coords() const { return {x, y, t}; }
};

/// (x, y, t)(x', y', t') = (x + x', y + y', t + t' - 2xy' + 2x'y).
H1Point h1_mul(const H1Point& p, const H1Point& q);
H1Point h1_inv(const H1Point& p);
/// delta_s(x, y, t) = (sx, sy, s^2 t).
H1Point h1_dilate(const H1Point& p, double s);

/// ((x^2 + y^2)^2 + t^2)^{1/4}
double koranyi_norm(const H1Point& p);
/// ||q^{-1} p||
double koranyi_dist(const H1Point& p, const H1Point& q);
/// Lebesgue (Haar) volume pi^2/2 r^4.
double koranyi_ball_volume(double r);

/// Uniform samples of the Koranyi ball B_r(center), drawn at the origin by
/// rejection from [-r, r]^2 x [-r^2, r^2] and left-translated. With
/// `antithetic` the samples come in pairs center z, center z^{-1}.
class KoranyiBallSampler {
 public:
  KoranyiBallSampler(H1Point center, double r, std::size_t count, std::uint64_t seed, bool antithetic = true);

  /// Calls fn(q) for every sample; pairs are consecutive.
  template <class Fn>
  void for_each(Fn&& fn) {
    Rng rng(seed_);
    std::size_t drawn = 0;
    while (drawn < count_) {
      const H1Point z = draw(rng);
      fn(h1_mul(center_, z));
      ++drawn;
      if (antithetic_ && drawn < count_) {
        fn(h1_mul(center_, h1_inv(z)));
        ++drawn;
      }
    }
  }

  std::size_t count() const { return count_; }
  bool antithetic() const { return antithetic_; }
  /// Accepted / proposed over all for_each calls so far.
  double acceptance_rate() const { return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0; }
  /// Box volume times the acceptance rate.
  double volume_estimate() const;
  double volume_std_error() const;

 private:
  H1Point draw(Rng& rng);

  H1Point center_;
  double r_;
  std::size_t count_;
  std::uint64_t seed_;
  bool antithetic_;
  std::size_t proposed_ = 0;
  std::size_t accepted_ = 0;
};

/// Monte-Carlo volume of B_r with standard error.
Estimate koranyi_volume_mc(double r, std::size_t count, std::uint64_t seed);

/// X = d_x + 2y d_t, Y = d_y - 2x d_t applied to f (on R^3 as (x, y, t)).
std::pair<double, double> h1_horizontal_gradient(const ScalarField& f, const H1Point& p);
/// X^2 + Y^2 f.
double h1_sub_laplacian(const ScalarField& f, const H1Point& p);

/// (avg_{B_r(p)} f - f(p)) / r^2 with pair-based standard error.
Estimate h1_r_laplacian(const ScalarField& f, const H1Point& p, double r, std::size_t count, std::uint64_t seed);

struct H1Profile {
  std::vector<RadiusRow> rows;
  LimitEstimate limit;
};

/// Delta_r f(p) along the schedule, extrapolated with the general-power model.
H1Profile h1_r_laplacian_profile(const ScalarField& f, const H1Point& p, const RadiiSchedule& schedule, std::size_t count, std::uint64_t seed,
                                 ExtrapolationModel model = ExtrapolationModel::general_power);

struct BpzPair {
  std::string function;
  H1Point point;
  double sub_laplacian = 0.0;
  LimitEstimate limit;
  double ratio = 0.0;
  double ratio_error = 0.0;
  bool excluded = false;
};

struct BpzEstimate {
  /// inverse-variance weighted mean of the ratios
  double c_hat = 0.0;
  double std_error = 0.0;
  std::vector<BpzPair> pairs;
  /// per test function weighted means and errors
  std::vector<std::pair<std::string, Estimate>> per_function;
  /// per-function estimates agree within 3 joint standard errors
  bool consistent = true;
  std::vector<std::string> notices;

  CsvTable table() const;
  Record record() const;
};

/// Pairs with |Delta_H f(p)| < 1e-6 are excluded with a notice.
BpzEstimate bpz_constant_estimate(const std::vector<ScalarField>& functions, const std::vector<H1Point>& points, const RadiiSchedule& schedule,
                                  std::size_t count, std::uint64_t seed);

struct KsDensity {
  /// 1/2 avg ((f(q) - f(p)) / r)^2
  double value = 0.0;
  double std_error = 0.0;
  double horizontal_gradient_sq = 0.0;
  /// value / |grad_H f(p)|^2; NaN and ratio_defined = false when the gradient vanishes
  double ratio = 0.0;
  bool ratio_defined = true;
};

KsDensity h1_ks_density(const ScalarField& f, const H1Point& p, double r, std::size_t count, std::uint64_t seed);

}  // namespace amv
