#include "amv/operators/limits.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "amv/core/common.hpp"

namespace amv {

RadiiSchedule::RadiiSchedule(double r0, double ratio, int count) : r0_(r0), ratio_(ratio), count_(count) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("schedule: r0 must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("schedule: ratio must lie in (0, 1)");
  if (count < 1) throw ConfigError("schedule: count must be positive");
  radii_.resize(count);
  for (int j = 0; j < count; ++j) radii_[j] = r0 * std::pow(ratio, j);
}

RadiiSchedule RadiiSchedule::from_clearance(double clearance, double ratio, int count) { return {0.2 * clearance, ratio, count}; }

ExtrapolationModel parse_extrapolation_model(std::string_view name) {
  if (name == "even_powers" || name == "even-powers") return ExtrapolationModel::even_powers;
  if (name == "general_power" || name == "general-power") return ExtrapolationModel::general_power;
  if (name == "plain_last" || name == "plain-last") return ExtrapolationModel::plain_last;
  throw ConfigError("unknown extrapolation model '" + std::string(name) + "'");
}

std::string to_string(ExtrapolationModel model) {
  switch (model) {
    case ExtrapolationModel::even_powers: return "even_powers";
    case ExtrapolationModel::general_power: return "general_power";
    case ExtrapolationModel::plain_last: return "plain_last";
  }
  return "?";
}

namespace {

struct Fit {
  std::vector<double> coef;
  double c0_std = 0.0;
  double ssr = 0.0;
  std::vector<double> residuals;
};

// Weighted least squares for v ~ sum_k c_k r^{q_k} with q_0 = 0.
Fit linear_fit(const std::vector<double>& r, const std::vector<double>& v, const std::vector<double>& wts, const std::vector<double>& q) {
  const auto m = static_cast<Eigen::Index>(r.size());
  const auto p = static_cast<Eigen::Index>(q.size() + 1);
  // scale radii so the columns are of comparable size
  const double rs = *std::max_element(r.begin(), r.end());
  Eigen::MatrixXd a(m, p);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sw = std::sqrt(wts[i]);
    a(i, 0) = sw;
    for (Eigen::Index k = 1; k < p; ++k) a(i, k) = sw * std::pow(r[i] / rs, q[k - 1]);
    b[i] = sw * v[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd c = qr.solve(b);
  Fit f;
  f.coef.resize(p);
  f.coef[0] = c[0];
  for (Eigen::Index k = 1; k < p; ++k) f.coef[k] = c[k] / std::pow(rs, q[k - 1]);
  const Eigen::VectorXd res = a * c - b;
  f.ssr = res.squaredNorm();
  for (Eigen::Index i = 0; i < m; ++i) f.residuals.push_back(res[i] / std::sqrt(wts[i]));
  // covariance of c0 with the given weights taken as inverse variances
  if (qr.rank() == p) {
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::MatrixXd cov = ata.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    f.c0_std = std::sqrt(std::max(0.0, cov(0, 0)));
  }
  return f;
}

Fit general_fit(const std::vector<double>& r, const std::vector<double>& v, const std::vector<double>& wts, double& q_best) {
  double best = std::numeric_limits<double>::infinity();
  q_best = 2.0;
  constexpr int kScan = 151;
  for (int k = 0; k < kScan; ++k) {
    const double q = 0.5 + 1.5 * k / (kScan - 1);
    const double s = linear_fit(r, v, wts, {q}).ssr;
    if (s < best) {
      best = s;
      q_best = q;
    }
  }
  // golden-section refinement around the scan minimum
  double lo = std::max(0.5, q_best - 0.01), hi = std::min(2.0, q_best + 0.01);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 40; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (linear_fit(r, v, wts, {a}).ssr < linear_fit(r, v, wts, {b}).ssr) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double qr = 0.5 * (lo + hi);
  if (linear_fit(r, v, wts, {qr}).ssr <= best) q_best = qr;
  return linear_fit(r, v, wts, {q_best});
}

}  // namespace

LimitEstimate extrapolate_limit(const std::vector<double>& radii, const std::vector<double>& values, ExtrapolationModel model,
                                const std::vector<double>& std_errors) {
  if (radii.size() != values.size()) throw ConfigError("extrapolate_limit: radii and values differ in length");
  if (radii.size() < 4) throw ConfigError("extrapolate_limit: at least 4 radii required");
  if (!std_errors.empty() && std_errors.size() != radii.size()) throw ConfigError("extrapolate_limit: std_errors length mismatch");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ConfigError("extrapolate_limit: radii must be positive");
    if (!std::isfinite(values[i])) throw NumericalError("extrapolate_limit: non-finite value in table");
  }
  LimitEstimate est;
  est.model = model;
  est.radii = radii;
  est.values = values;
  est.std_errors = std_errors;

  if (model == ExtrapolationModel::plain_last) {
    const std::size_t n = values.size();
    est.value = values.back();
    const auto [mn, mx] = std::minmax({values[n - 1], values[n - 2], values[n - 3]});
    est.error = mx - mn;
    est.coefficients = {est.value};
    return est;
  }

  // order by decreasing radius so "drop the first" removes the largest radius
  std::vector<std::size_t> order(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] > radii[b]; });
  std::vector<double> r, v, w;
  double floor = 0.0;
  if (!std_errors.empty()) {
    for (const double s : std_errors) floor = std::max(floor, s);
    floor = std::max(floor * 1e-3, 1e-300);
  }
  for (const auto i : order) {
    r.push_back(radii[i]);
    v.push_back(values[i]);
    w.push_back(std_errors.empty() ? 1.0 : 1.0 / std::pow(std::max(std_errors[i], floor), 2));
  }

  std::vector<double> q;
  Fit full;
  if (model == ExtrapolationModel::even_powers) {
    q = r.size() >= 5 ? std::vector<double>{2.0, 4.0} : std::vector<double>{2.0};
    full = linear_fit(r, v, w, q);
  } else {
    double qb = 2.0;
    full = general_fit(r, v, w, qb);
    q = {qb};
  }
  est.value = full.coef[0];
  est.exponents = q;
  est.coefficients = full.coef;
  double ss = 0.0;
  for (const double e : full.residuals) ss += e * e;
  est.residual = std::sqrt(ss / static_cast<double>(full.residuals.size()));

  // refit without the largest radius
  const std::vector<double> r2(r.begin() + 1, r.end()), v2(v.begin() + 1, v.end()), w2(w.begin() + 1, w.end());
  double drop = est.value;
  if (r2.size() >= q.size() + 2) {
    if (model == ExtrapolationModel::even_powers) {
      drop = linear_fit(r2, v2, w2, q).coef[0];
    } else {
      double qb = 2.0;
      drop = general_fit(r2, v2, w2, qb).coef[0];
    }
  }
  const double sampling = std_errors.empty() ? 0.0 : full.c0_std;
  est.error = std::hypot(std::abs(est.value - drop), sampling);

  const std::size_t third = std::max<std::size_t>(1, r.size() / 3);
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < third; ++i) {
    head = std::max(head, std::abs(full.residuals[i]));
    tail = std::max(tail, std::abs(full.residuals[r.size() - 1 - i]));
  }
  const double noise = std::abs(est.value) * 1e-13 + 1e-300;
  est.residual_growth = tail > 3.0 * head && tail > noise;
  return est;
}

Record LimitEstimate::record() const {
  Record rec;
  rec.set("model", to_string(model));
  rec.set("limit", value);
  rec.set("error", error);
  rec.set("residual", residual);
  rec.set("residual_growth", residual_growth);
  for (std::size_t k = 0; k < exponents.size(); ++k) rec.set("exponent" + std::to_string(k + 1), exponents[k]);
  for (std::size_t k = 0; k < coefficients.size(); ++k) rec.set("coefficient" + std::to_string(k), coefficients[k]);
  rec.set("radii", static_cast<long long>(radii.size()));
  if (!radii.empty()) {
    rec.set("smallest_radius", *std::min_element(radii.begin(), radii.end()));
  }
  return rec;
}

}  // namespace amv
