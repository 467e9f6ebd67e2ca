#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amv/core/io.hpp"

namespace amv {

/// r_j = r0 * ratio^j, j = 0..count-1.
class RadiiSchedule {
 public:
  RadiiSchedule(double r0, double ratio, int count);
  /// r0 = 0.2 * clearance, ratio 0.7, 12 radii.
  static RadiiSchedule from_clearance(double clearance, double ratio = 0.7, int count = 12);

  double r0() const { return r0_; }
  double ratio() const { return ratio_; }
  int count() const { return count_; }
  double operator[](int j) const { return radii_[j]; }
  const std::vector<double>& radii() const { return radii_; }
  double smallest() const { return radii_.back(); }

 private:
  double r0_, ratio_;
  int count_;
  std::vector<double> radii_;
};

enum class ExtrapolationModel { even_powers, general_power, plain_last };

ExtrapolationModel parse_extrapolation_model(std::string_view name);
std::string to_string(ExtrapolationModel model);

/// Extrapolated r -> 0 value of a per-radius table.
struct LimitEstimate {
  double value = 0.0;
  /// Spread between the full fit and the fit without the largest radius,
  /// combined with the propagated sampling error when one was given.
  double error = 0.0;
  ExtrapolationModel model = ExtrapolationModel::even_powers;
  std::vector<double> exponents;
  /// c0, c1, ... matching 1, r^{q1}, ...
  std::vector<double> coefficients;
  /// Root-mean-square fit residual.
  double residual = 0.0;
  /// Residuals at the smallest radii exceed three times those at the largest.
  bool residual_growth = false;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> std_errors;

  Record record() const;
};

/// Least-squares fit of v(r) = c0 + c1 r^q1 (+ c2 r^q2).
///   even_powers:   q = (2, 4)
///   general_power: single power, q1 searched over [0.5, 2]
///   plain_last:    last value, error = spread of the last three
/// std_errors (optional, same length) weight the fit by inverse variance.
LimitEstimate extrapolate_limit(const std::vector<double>& radii, const std::vector<double>& values, ExtrapolationModel model,
                                const std::vector<double>& std_errors = {});

}  // namespace amv
