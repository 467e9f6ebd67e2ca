#include "amv/geometry/profiles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "amv/core/box_quadrature.hpp"

namespace amv {

ComparisonProfile::ComparisonProfile(double k, double n) : k_(k), n_(n) {
  if (!(n >= 1.0)) throw ConfigError("comparison profile: N must be at least 1");
  if (k != 0.0 && !(n > 1.0)) throw ConfigError("comparison profile: N must exceed 1 when K != 0");
}

double ComparisonProfile::max_radius() const {
  return k_ > 0.0 ? std::numbers::pi * std::sqrt((n_ - 1.0) / k_) : std::numeric_limits<double>::infinity();
}

double ComparisonProfile::s(double t) const {
  if (k_ == 0.0) return t;
  const double a = std::sqrt(std::abs(k_) / (n_ - 1.0));
  return k_ > 0.0 ? std::sin(a * t) / a : std::sinh(a * t) / a;
}

double ComparisonProfile::v(double r) const {
  if (!(r >= 0.0)) throw ConfigError("v_kn: radius must be non-negative");
  if (r > max_radius()) throw DomainError("v_kn: radius beyond pi sqrt((N-1)/K)");
  if (k_ == 0.0) return omega(n_) * std::pow(r, n_);
  if (r == 0.0) return 0.0;
  // v = omega_N r^N N int_0^1 u^{N-1} (s(ru)/(ru))^{N-1} du
  using boost::math::quadrature::gauss_kronrod;
  const auto g = [this, r](double u) {
    if (u == 0.0) return 0.0;
    return std::pow(u, n_ - 1.0) * std::pow(s(r * u) / (r * u), n_ - 1.0);
  };
  const double integral = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 8, 1e-14);
  return omega(n_) * std::pow(r, n_) * n_ * integral;
}

double s_kn(double k, double n, double t) { return ComparisonProfile(k, n).s(t); }
double v_kn(double k, double n, double r) { return ComparisonProfile(k, n).v(r); }

namespace {

// mu(B_r(x)) with the sampling error of the weight average
Estimate mass_with_error(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, double r) {
  const double mass = ball_mass(space, quad, x, r);
  if (space.weight().is_constant() || quad.mode() == SamplingMode::tensor_grid) return {mass, 0.0};
  const int n = space.dim();
  Scratch y;
  y.dim = n;
  const bool paired = quad.paired();
  std::vector<double> units;
  for (std::size_t i = 0; i < quad.size();) {
    double v = 0.0;
    const std::size_t take = paired && i + 1 < quad.size() ? 2 : 1;
    for (std::size_t k = 0; k < take; ++k) {
      const auto z = quad.node(i + k);
      for (int a = 0; a < n; ++a) y.data[a] = x[a] + r * z[a];
      v += space.weight()(y.view()) / static_cast<double>(take);
    }
    units.push_back(v);
    i += take;
  }
  double mean = 0.0;
  for (const double u : units) mean += u;
  mean /= static_cast<double>(units.size());
  double var = 0.0;
  for (const double u : units) var += (u - mean) * (u - mean);
  var /= std::max<double>(1.0, static_cast<double>(units.size()) - 1.0);
  const double se = std::sqrt(var / static_cast<double>(units.size()));
  return {mass, mass * se / std::abs(mean)};
}

}  // namespace

Estimate bg_density(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, double r, double n) {
  const auto m = mass_with_error(space, quad, x, r);
  const double base = omega(n) * std::pow(r, n);
  return {m.value / base, m.std_error / base};
}

double bg_density(const FiniteSpace& space, std::size_t x, double r, double n) { return space.ball_mass(x, r) / (omega(n) * std::pow(r, n)); }

double bg_density_h1(double r, double n) { return koranyi_ball_volume(r) / (omega(n) * std::pow(r, n)); }

std::string BgMonotonicity::verdict() const {
  if (spread <= 1e-12) return "constant";
  if (strictly_decreasing) return "strictly_decreasing";
  if (non_increasing) return "non_increasing";
  return "increasing_somewhere";
}

CsvTable BgMonotonicity::table() const {
  CsvTable t({"radius", "mass", "comparison", "ratio", "stderr"});
  for (const auto& r : rows) t.add_row({r.radius, r.mass, r.comparison, r.ratio, r.std_error});
  return t;
}

BgMonotonicity bg_monotonicity_check(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, const ComparisonProfile& profile,
                                     const RadiiSchedule& schedule) {
  std::vector<double> radii = schedule.radii();
  std::sort(radii.begin(), radii.end());
  if (radii.back() > profile.max_radius()) throw DomainError("bg_monotonicity_check: radius beyond the comparison interval");
  BgMonotonicity out;
  out.rows.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t j) {
    const auto m = mass_with_error(space, quad, x, radii[j]);
    const double v = profile.v(radii[j]);
    out.rows[j] = {radii[j], m.value, v, m.value / v, m.std_error / v};
  });
  for (std::size_t j = 0; j + 1 < out.rows.size(); ++j) {
    const auto& a = out.rows[j];
    const auto& b = out.rows[j + 1];
    const double slack = 3.0 * std::hypot(a.std_error, b.std_error);
    if (b.ratio > a.ratio + slack) out.non_increasing = false;
    if (!(b.ratio < a.ratio - slack)) out.strictly_decreasing = false;
  }
  for (const auto& r : out.rows) out.spread = std::max(out.spread, std::abs(r.ratio - out.rows.front().ratio));
  return out;
}

BoundFit comparison_bound_fit(const ComparisonProfile& profile, double r_max, int probes, int dense) {
  const double n = profile.n();
  const double w = omega(n);
  BoundFit fit;
  fit.leading = -n * profile.k() * w / (6.0 * (n + 2.0));
  fit.fitted = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < probes; ++j) {
    const double r = r_max * std::pow(0.7, j);
    fit.fitted = std::max(fit.fitted, (profile.v(r) - w * std::pow(r, n)) / std::pow(r, n + 2.0));
  }
  fit.holds = true;
  fit.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= dense; ++i) {
    const double r = r_max * i / dense;
    const double bound = w * std::pow(r, n) + fit.fitted * std::pow(r, n + 2.0);
    const double slack = (bound - profile.v(r)) / std::pow(r, n + 2.0);
    fit.worst_slack = std::min(fit.worst_slack, slack);
    // relative rounding allowance of the quadrature
    if (profile.v(r) > bound * (1.0 + 1e-13)) fit.holds = false;
  }
  return fit;
}

std::string to_string(MmVerdict v) {
  switch (v) {
    case MmVerdict::vanishing:
      return "vanishing";
    case MmVerdict::non_vanishing:
      return "non-vanishing";
    default:
      return "inconclusive";
  }
}

CsvTable MmBoundaryReport::table() const {
  CsvTable t({"radius", "pairing", "pairing_stderr", "rescaled_pairing", "total_variation"});
  for (const auto& r : rows) t.add_row({r.radius, r.pairing, r.pairing_std_error, r.radius * r.pairing, r.total_variation});
  return t;
}

Record MmBoundaryReport::record() const {
  Record rec;
  rec.set("verdict", to_string(verdict));
  rec.set("rescaled_limit", rescaled_limit.value);
  rec.set("rescaled_limit_error", rescaled_limit.error);
  rec.set("predicted_rescaled_limit", predicted_rescaled_limit);
  rec.set("prediction_relative_deviation", predicted_rescaled_limit != 0.0
                                               ? std::abs(rescaled_limit.value - predicted_rescaled_limit) / std::abs(predicted_rescaled_limit)
                                               : std::abs(rescaled_limit.value));
  rec.set("total_variation_growth", total_variation_growth);
  return rec;
}

MmBoundaryReport mm_boundary_defect(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& phi, const RadiiSchedule& schedule,
                                    int panels) {
  const auto sup = phi.support();
  if (!sup) throw ConfigError("mm_boundary_defect: test function has no compact support");
  for (int a = 0; a < space.dim(); ++a) {
    const double reach = schedule.r0() * space.norm().axis_extent(a);
    if (sup->lo[a] - reach < space.box().lo[a] || sup->hi[a] + reach > space.box().hi[a]) {
      throw DomainError("mm_boundary_defect: support of the test function is closer than r0 to the boundary");
    }
  }
  const BoxQuadrature rule(*sup, panels);
  const auto& radii = schedule.radii();
  const std::size_t nr = radii.size(), nk = rule.size();
  const int n = space.dim();
  const double j = space.hausdorff_ratio();
  std::vector<double> pair(nr * nk), pvar(nr * nk), tv(nr * nk);
  parallel_for(nk, [&](std::size_t k) {
    const auto x = rule.node(k);
    const double dmu = j * rule.weight(k) * space.weight()(x);
    const double ph = phi(x);
    for (std::size_t i = 0; i < nr; ++i) {
      const auto th = bg_density(space, quad, x, radii[i], n);
      const double d = (1.0 - th.value) / radii[i];
      pair[i * nk + k] = ph * d * dmu;
      pvar[i * nk + k] = std::pow(ph * dmu * th.std_error / radii[i], 2);
      tv[i * nk + k] = std::abs(d) * dmu;
    }
  });
  MmBoundaryReport rep;
  std::vector<double> scaled(nr), scaled_err(nr);
  bool noisy = false;
  for (std::size_t i = 0; i < nr; ++i) {
    CompensatedSum p, v, t;
    for (std::size_t k = 0; k < nk; ++k) {
      p.add(pair[i * nk + k]);
      v.add(pvar[i * nk + k]);
      t.add(tv[i * nk + k]);
    }
    rep.rows.push_back({radii[i], p.value(), std::sqrt(v.value()), t.value()});
    scaled[i] = radii[i] * p.value();
    scaled_err[i] = radii[i] * std::sqrt(v.value());
    noisy = noisy || scaled_err[i] > 0.0;
  }
  rep.rescaled_limit = extrapolate_limit(radii, scaled, ExtrapolationModel::even_powers, noisy ? scaled_err : std::vector<double>{});
  CompensatedSum pred;
  for (std::size_t k = 0; k < nk; ++k) {
    const auto x = rule.node(k);
    const double w = space.weight()(x);
    pred.add(phi(x) * (1.0 - j * w) * j * rule.weight(k) * w);
  }
  rep.predicted_rescaled_limit = pred.value();
  const double t_first = rep.rows.front().total_variation, t_last = rep.rows.back().total_variation;
  rep.total_variation_growth = t_first > 0.0 ? t_last / t_first : (t_last > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);

  // scale for "zero": the pairing of phi with a unit defect
  CompensatedSum mass;
  for (std::size_t k = 0; k < nk; ++k) mass.add(std::abs(phi(rule.node(k))) * j * rule.weight(k) * space.weight()(rule.node(k)));
  const double floor = 1e-9 * mass.value();
  const auto& last = rep.rows.back();
  const bool bounded = rep.total_variation_growth <= 2.0;
  const bool pairing_small = std::abs(last.pairing) <= 3.0 * last.pairing_std_error + floor;
  const bool limit_nonzero = std::abs(rep.rescaled_limit.value) > 3.0 * rep.rescaled_limit.error + floor;
  if (pairing_small && bounded) {
    rep.verdict = MmVerdict::vanishing;
  } else if (limit_nonzero && !bounded) {
    rep.verdict = MmVerdict::non_vanishing;
  } else {
    rep.verdict = MmVerdict::inconclusive;
  }
  return rep;
}

Record HausdorffRatio::record() const {
  Record r;
  r.set("candidate", candidate);
  r.set("empirical", empirical);
  r.set("empirical_std_error", empirical_std_error);
  r.set("agree", agree);
  return r;
}

HausdorffRatio norm_hausdorff_ratio(const Norm& norm, std::size_t count, std::uint64_t seed) {
  const int n = norm.dim();
  HausdorffRatio out;
  out.candidate = omega(n) / norm.unit_ball_volume();
  // density of c * Lebesgue is c Leb(B)/omega_n at every x and r; the defect is
  // affine in c and the sweep locates its root
  const BallQuadrature q(norm, count, SamplingMode::monte_carlo, seed);
  const double vol = q.volume_estimate();
  const double p = q.acceptance_rate();
  const double proposals = static_cast<double>(q.size()) / p;
  const double vol_se = vol * std::sqrt((1.0 - p) / (p * proposals));
  const double c1 = 0.5, c2 = 2.0;
  const double d1 = 1.0 - c1 * vol / omega(n), d2 = 1.0 - c2 * vol / omega(n);
  out.empirical = c1 - d1 * (c2 - c1) / (d2 - d1);
  out.empirical_std_error = omega(n) / (vol * vol) * vol_se;
  out.agree = std::abs(out.empirical - out.candidate) <= 3.0 * out.empirical_std_error + 1e-12;
  return out;
}

}  // namespace amv
