#include "amv/operators/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace amv {

CsvTable radius_table(const std::vector<RadiusRow>& rows) {
  CsvTable t({"radius", "value", "stderr"});
  for (const auto& r : rows) t.add_row(std::vector<double>{r.radius, r.value, r.std_error});
  return t;
}

namespace {

double limsup_tail(const std::vector<RadiusRow>& rows) {
  const std::size_t n = rows.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 3);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = n - tail; i < n; ++i) m = std::max(m, rows[i].value);
  return m;
}

void check_p(double p) {
  if (!(p >= 1.0)) throw ConfigError("amv norm: p must lie in [1, inf]");
}

}  // namespace

AmvNormProfile amv_norm_profile(const FiniteSpace& space, const Eigen::VectorXd& u, double p, const std::vector<std::size_t>& region,
                                const RadiiSchedule& schedule) {
  check_p(p);
  if (region.empty()) throw ConfigError("amv norm: empty region");
  AmvNormProfile out;
  for (const double r : schedule.radii()) {
    CompensatedSum s, m;
    double mx = 0.0;
    for (const auto i : region) {
      const double v = std::abs(r_laplacian(space, u, r, i));
      mx = std::max(mx, v);
      if (!std::isinf(p)) {
        s.add(space.mass(i) * std::pow(v, p));
        m.add(space.mass(i));
      }
    }
    const double val = std::isinf(p) ? mx : std::pow(s.value() / m.value(), 1.0 / p);
    out.rows.push_back({r, val, 0.0});
  }
  out.limsup = limsup_tail(out.rows);
  return out;
}

AmvNormProfile amv_norm_profile(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double p, const Box& region,
                                const RadiiSchedule& schedule, int panels) {
  check_p(p);
  // every point of K must admit the largest ball
  std::vector<int> corner(region.dim(), 0);
  Point c(region.dim());
  while (true) {
    for (int a = 0; a < region.dim(); ++a) c[a] = corner[a] ? region.hi[a] : region.lo[a];
    if (space.clearance(c) < schedule.r0()) throw DomainError("amv norm: region is closer than r0 to the domain boundary");
    int a = 0;
    while (a < region.dim() && ++corner[a] == 2) corner[a++] = 0;
    if (a == region.dim()) break;
  }
  const BoxQuadrature bq(region, panels, 2);
  AmvNormProfile out;
  for (const double r : schedule.radii()) {
    std::vector<Estimate> vals(bq.size());
    parallel_for(bq.size(), [&](std::size_t k) { vals[k] = r_laplacian_with_error(space, quad, u, r, bq.node(k)); });
    CompensatedSum s, m, se;
    double mx = 0.0, mx_err = 0.0;
    for (std::size_t k = 0; k < bq.size(); ++k) {
      const double v = std::abs(vals[k].value);
      if (v >= mx) {
        mx = v;
        mx_err = vals[k].std_error;
      }
      const double wk = bq.weight(k) * space.weight()(bq.node(k));
      s.add(wk * std::pow(v, std::isinf(p) ? 1.0 : p));
      se.add(wk * vals[k].std_error);
      m.add(wk);
    }
    if (std::isinf(p)) {
      out.rows.push_back({r, mx, mx_err});
    } else {
      out.rows.push_back({r, std::pow(s.value() / m.value(), 1.0 / p), se.value() / m.value()});
    }
  }
  out.limsup = limsup_tail(out.rows);
  return out;
}

double sharp_maximal(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double big_r, PointView x, int levels) {
  if (!(big_r > 0.0) || levels < 0) throw ConfigError("sharp maximal: R must be positive and levels non-negative");
  double best = 0.0;
  for (int j = 0; j <= levels; ++j) {
    const double r = big_r * std::ldexp(1.0, -j);
    const double ub = average(space, quad, u, r, x);
    const ScalarField dev = ScalarField::from_callable([&](PointView y) { return std::abs(u(y) - ub); }, "dev", space.dim());
    best = std::max(best, average(space, quad, dev, r, x));
  }
  return best;
}

double sharp_maximal(const FiniteSpace& space, const Eigen::VectorXd& u, double big_r, std::size_t x, int levels) {
  if (!(big_r > 0.0) || levels < 0) throw ConfigError("sharp maximal: R must be positive and levels non-negative");
  double best = 0.0;
  for (int j = 0; j <= levels; ++j) {
    const double r = big_r * std::ldexp(1.0, -j);
    const double ub = average(space, u, r, x);
    best = std::max(best, average(space, (u.array() - ub).abs().matrix(), r, x));
  }
  return best;
}

double restricted_maximal(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& g, double big_r, PointView x, int levels) {
  if (!(big_r > 0.0) || levels < 0) throw ConfigError("restricted maximal: R must be positive and levels non-negative");
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= levels; ++j) best = std::max(best, average(space, quad, g, big_r * std::ldexp(1.0, -j), x));
  return best;
}

double restricted_maximal(const FiniteSpace& space, const Eigen::VectorXd& g, double big_r, std::size_t x, int levels) {
  if (!(big_r > 0.0) || levels < 0) throw ConfigError("restricted maximal: R must be positive and levels non-negative");
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= levels; ++j) best = std::max(best, average(space, g, big_r * std::ldexp(1.0, -j), x));
  return best;
}

double hajlasz_ratio(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, PointView x, PointView y, double r, double c,
                     int t_points, int t_panels) {
  Point diff(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) diff[a] = x[a] - y[a];
  const double d = space.norm()(diff);
  if (!(d > 0.0) || !(d < r)) throw ConfigError("hajlasz: need 0 < d(x,y) < r");
  const double lhs = std::abs(refined_average(space, quad, u, r, x, t_points, t_panels) - refined_average(space, quad, u, r, y, t_points, t_panels));
  const ScalarField dev = ScalarField::from_callable([&](PointView z) { return std::abs(u(z) - c); }, "dev", space.dim());
  const double rhs = average(space, quad, dev, 2.0 * r, x) + average(space, quad, dev, 2.0 * r, y);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs * r / (d * rhs);
}

CsvTable HajlaszSweep::table() const {
  CsvTable t({"radius", "constant"});
  for (std::size_t j = 0; j < radii.size(); ++j) t.add_row({radii[j], constants[j]});
  return t;
}

HajlaszSweep hajlasz_constant(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const std::vector<double>& radii,
                              const Box& region, int pairs, std::uint64_t seed, double d_fraction) {
  const int n = space.dim();
  if (n < 2) throw ConfigError("hajlasz_constant: needs dimension at least 2");
  HajlaszSweep out;
  out.radii = radii;
  out.constants.assign(radii.size(), 0.0);
  const double mid = 0.5 * (region.lo[0] + region.hi[0]);
  std::vector<double> ratios(radii.size() * static_cast<std::size_t>(pairs));
  parallel_for(ratios.size(), [&](std::size_t task) {
    const std::size_t j = task / static_cast<std::size_t>(pairs), k = task % static_cast<std::size_t>(pairs);
    const double r = radii[j];
    Rng rng(stream_seed(seed, {j, k}));
    Point x(n), y(n);
    x[0] = mid + rng.uniform(-r, r);
    for (int a = 1; a < n; ++a) x[a] = rng.uniform(region.lo[a], region.hi[a]);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    y = x;
    y[0] += d_fraction * r * std::cos(theta);
    y[1] += d_fraction * r * std::sin(theta);
    // rescale the offset to the norm's distance
    Point diff(n);
    for (int a = 0; a < n; ++a) diff[a] = y[a] - x[a];
    const double d = space.norm()(diff);
    for (int a = 0; a < n; ++a) y[a] = x[a] + diff[a] * (d_fraction * r / d);
    const double c = average(space, quad, u, 3.0 * r, x);
    ratios[task] = hajlasz_ratio(space, quad, u, x, y, r, c);
  });
  for (std::size_t task = 0; task < ratios.size(); ++task) {
    auto& m = out.constants[task / static_cast<std::size_t>(pairs)];
    m = std::max(m, ratios[task]);
  }
  const auto [lo, hi] = std::minmax_element(out.constants.begin(), out.constants.end());
  out.spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace amv
