#include "amv/heisenberg/h1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace amv {

H1Point h1_mul(const H1Point& p, const H1Point& q) { return {p.x + q.x, p.y + q.y, p.t + q.t - 2.0 * p.x * q.y + 2.0 * q.x * p.y}; }

H1Point h1_inv(const H1Point& p) { return {-p.x, -p.y, -p.t}; }

H1Point h1_dilate(const H1Point& p, double s) { return {s * p.x, s * p.y, s * s * p.t}; }

double koranyi_norm(const H1Point& p) {
  const double a = p.x * p.x + p.y * p.y;
  return std::pow(a * a + p.t * p.t, 0.25);
}

double koranyi_dist(const H1Point& p, const H1Point& q) { return koranyi_norm(h1_mul(h1_inv(q), p)); }

double koranyi_ball_volume(double r) {
  if (!(r > 0.0)) throw ConfigError("koranyi_ball_volume: radius must be positive");
  return std::numbers::pi * std::numbers::pi / 2.0 * std::pow(r, 4);
}

KoranyiBallSampler::KoranyiBallSampler(H1Point center, double r, std::size_t count, std::uint64_t seed, bool antithetic)
    : center_(center), r_(r), count_(count), seed_(seed), antithetic_(antithetic) {
  if (!(r > 0.0)) throw ConfigError("KoranyiBallSampler: radius must be positive");
  if (count == 0) throw ConfigError("KoranyiBallSampler: sample count must be positive");
}

H1Point KoranyiBallSampler::draw(Rng& rng) {
  constexpr std::size_t kFloorWindow = 10000;
  for (;;) {
    const H1Point z{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    ++proposed_;
    const double a = z.x * z.x + z.y * z.y;
    if (a * a + z.t * z.t < 1.0) {
      ++accepted_;
      return h1_dilate(z, r_);
    }
    if (proposed_ >= kFloorWindow && static_cast<double>(accepted_) < 1e-3 * static_cast<double>(proposed_)) {
      throw NumericalError("KoranyiBallSampler: acceptance rate below 1e-3");
    }
  }
}

double KoranyiBallSampler::volume_estimate() const { return 8.0 * std::pow(r_, 4) * acceptance_rate(); }

double KoranyiBallSampler::volume_std_error() const {
  if (proposed_ == 0) return 0.0;
  const double p = acceptance_rate();
  return 8.0 * std::pow(r_, 4) * std::sqrt(p * (1.0 - p) / static_cast<double>(proposed_));
}

Estimate koranyi_volume_mc(double r, std::size_t count, std::uint64_t seed) {
  KoranyiBallSampler s({}, r, count, seed, false);
  s.for_each([](const H1Point&) {});
  return {s.volume_estimate(), s.volume_std_error()};
}

std::pair<double, double> h1_horizontal_gradient(const ScalarField& f, const H1Point& p) {
  const Point c = p.coords();
  const Eigen::VectorXd g = f.gradient(c);
  return {g[0] + 2.0 * p.y * g[2], g[1] - 2.0 * p.x * g[2]};
}

double h1_sub_laplacian(const ScalarField& f, const H1Point& p) {
  if (f.min_dim() > 3) throw ConfigError("h1_sub_laplacian: '" + f.descriptor() + "' needs more than three coordinates");
  const Point c = p.coords();
  const Eigen::MatrixXd h = f.hessian(c);
  const double x = p.x, y = p.y;
  return h(0, 0) + h(1, 1) + 4.0 * (x * x + y * y) * h(2, 2) + 4.0 * y * h(0, 2) - 4.0 * x * h(1, 2);
}

Estimate h1_r_laplacian(const ScalarField& f, const H1Point& p, double r, std::size_t count, std::uint64_t seed) {
  const Point c = p.coords();
  const double fp = f(c);
  KoranyiBallSampler s(p, r, count, seed, true);
  // pairs (or single samples) are the independent units
  CompensatedSum sum, sq;
  std::size_t units = 0;
  double pending = 0.0;
  bool half = false;
  const auto close = [&](double v) {
    sum.add(v);
    sq.add(v * v);
    ++units;
  };
  s.for_each([&](const H1Point& q) {
    const double v = f(q.coords()) - fp;
    if (!half) {
      pending = v;
      half = true;
    } else {
      close(0.5 * (pending + v));
      half = false;
    }
  });
  if (half) close(pending);
  const double n = static_cast<double>(units);
  const double mean = sum.value() / n;
  const double var = units > 1 ? std::max(0.0, (sq.value() - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean / (r * r), std::sqrt(var / n) / (r * r)};
}

H1Profile h1_r_laplacian_profile(const ScalarField& f, const H1Point& p, const RadiiSchedule& schedule, std::size_t count, std::uint64_t seed,
                                 ExtrapolationModel model) {
  const auto& radii = schedule.radii();
  std::vector<Estimate> est(radii.size());
  parallel_for(radii.size(), [&](std::size_t j) { est[j] = h1_r_laplacian(f, p, radii[j], count, stream_seed(seed, {j})); });
  H1Profile prof;
  std::vector<double> vals, errs;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    prof.rows.push_back({radii[j], est[j].value, est[j].std_error});
    vals.push_back(est[j].value);
    errs.push_back(est[j].std_error);
  }
  const bool noisy = std::any_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; });
  prof.limit = extrapolate_limit(radii, vals, model, noisy ? errs : std::vector<double>{});
  return prof;
}

namespace {

Estimate weighted_mean(const std::vector<std::pair<double, double>>& xs) {
  double sw = 0.0, swx = 0.0;
  for (const auto& [v, e] : xs) {
    const double w = 1.0 / std::max(e * e, 1e-300);
    sw += w;
    swx += w * v;
  }
  return {swx / sw, 1.0 / std::sqrt(sw)};
}

}  // namespace

BpzEstimate bpz_constant_estimate(const std::vector<ScalarField>& functions, const std::vector<H1Point>& points, const RadiiSchedule& schedule,
                                  std::size_t count, std::uint64_t seed) {
  BpzEstimate out;
  const std::size_t nf = functions.size(), np = points.size();
  out.pairs.resize(nf * np);
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t k = 0; k < np; ++k) {
      auto& pr = out.pairs[i * np + k];
      pr.function = functions[i].descriptor();
      pr.point = points[k];
      pr.sub_laplacian = h1_sub_laplacian(functions[i], points[k]);
      pr.excluded = std::abs(pr.sub_laplacian) < 1e-6;
    }
  }
  // one task per (function, point, radius)
  const auto& radii = schedule.radii();
  const std::size_t nr = radii.size();
  std::vector<Estimate> est(nf * np * nr);
  parallel_for(est.size(), [&](std::size_t task) {
    const std::size_t pair = task / nr, j = task % nr;
    if (out.pairs[pair].excluded) return;
    const std::size_t i = pair / np, k = pair % np;
    est[task] = h1_r_laplacian(functions[i], points[k], radii[j], count, stream_seed(seed, {i, k, j}));
  });
  std::vector<std::pair<double, double>> all;
  for (std::size_t i = 0; i < nf; ++i) {
    std::vector<std::pair<double, double>> mine;
    for (std::size_t k = 0; k < np; ++k) {
      auto& pr = out.pairs[i * np + k];
      if (pr.excluded) {
        out.notices.push_back("excluded " + pr.function + " at (" + format_number(pr.point.x) + ", " + format_number(pr.point.y) + ", " +
                              format_number(pr.point.t) + "): sub-Laplacian below 1e-6");
        continue;
      }
      std::vector<double> vals(nr), errs(nr);
      for (std::size_t j = 0; j < nr; ++j) {
        vals[j] = est[(i * np + k) * nr + j].value;
        errs[j] = est[(i * np + k) * nr + j].std_error;
      }
      pr.limit = extrapolate_limit(radii, vals, ExtrapolationModel::general_power, errs);
      pr.ratio = pr.limit.value / pr.sub_laplacian;
      pr.ratio_error = pr.limit.error / std::abs(pr.sub_laplacian);
      mine.emplace_back(pr.ratio, pr.ratio_error);
      all.emplace_back(pr.ratio, pr.ratio_error);
    }
    if (!mine.empty()) out.per_function.emplace_back(functions[i].descriptor(), weighted_mean(mine));
  }
  if (all.empty()) throw NumericalError("bpz_constant_estimate: every (function, point) pair was excluded");
  const auto c = weighted_mean(all);
  out.c_hat = c.value;
  out.std_error = c.std_error;
  for (std::size_t a = 0; a < out.per_function.size(); ++a) {
    for (std::size_t b = a + 1; b < out.per_function.size(); ++b) {
      const auto& ea = out.per_function[a].second;
      const auto& eb = out.per_function[b].second;
      if (std::abs(ea.value - eb.value) > 3.0 * std::hypot(ea.std_error, eb.std_error)) out.consistent = false;
    }
  }
  return out;
}

CsvTable BpzEstimate::table() const {
  CsvTable t({"function", "x", "y", "t", "sub_laplacian", "limit", "limit_error", "exponent", "ratio", "ratio_error", "excluded"});
  for (const auto& p : pairs) {
    t.add_row({p.function, format_number(p.point.x), format_number(p.point.y), format_number(p.point.t), format_number(p.sub_laplacian),
               format_number(p.limit.value), format_number(p.limit.error), p.limit.exponents.empty() ? "" : format_number(p.limit.exponents.front()),
               format_number(p.ratio), format_number(p.ratio_error), p.excluded ? "1" : "0"});
  }
  return t;
}

Record BpzEstimate::record() const {
  Record r;
  r.set("c_hat", c_hat);
  r.set("c_hat_std_error", std_error);
  r.set("reference", 1.0 / (3.0 * std::numbers::pi));
  r.set("relative_deviation", std::abs(c_hat * 3.0 * std::numbers::pi - 1.0));
  r.set("consistent", consistent);
  for (const auto& [name, e] : per_function) {
    r.set("c_hat[" + name + "]", e.value);
    r.set("c_hat_std_error[" + name + "]", e.std_error);
  }
  for (std::size_t i = 0; i < notices.size(); ++i) r.set("notice_" + std::to_string(i + 1), notices[i]);
  return r;
}

KsDensity h1_ks_density(const ScalarField& f, const H1Point& p, double r, std::size_t count, std::uint64_t seed) {
  const double fp = f(p.coords());
  KoranyiBallSampler s(p, r, count, seed, true);
  CompensatedSum sum, sq;
  std::size_t units = 0;
  double pending = 0.0;
  bool half = false;
  s.for_each([&](const H1Point& q) {
    const double d = (f(q.coords()) - fp) / r;
    const double v = 0.5 * d * d;
    if (!half) {
      pending = v;
      half = true;
      return;
    }
    const double u = 0.5 * (pending + v);
    sum.add(u);
    sq.add(u * u);
    ++units;
    half = false;
  });
  if (half) {
    sum.add(pending);
    sq.add(pending * pending);
    ++units;
  }
  const double n = static_cast<double>(units);
  KsDensity out;
  out.value = sum.value() / n;
  out.std_error = units > 1 ? std::sqrt(std::max(0.0, (sq.value() - n * out.value * out.value) / (n - 1.0)) / n) : 0.0;
  const auto [gx, gy] = h1_horizontal_gradient(f, p);
  out.horizontal_gradient_sq = gx * gx + gy * gy;
  if (out.horizontal_gradient_sq == 0.0) {
    out.ratio_defined = false;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.ratio = out.value / out.horizontal_gradient_sq;
  }
  return out;
}

}  // namespace amv
