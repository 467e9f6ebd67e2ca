#include "amv/operators/averaging.hpp"

#include <algorithm>
#include <cmath>

#include "amv/core/quadrature1d.hpp"

namespace amv {

// ---------------------------------------------------------------------------
// finite spaces

namespace {

void check_finite(const FiniteSpace& space, const Eigen::VectorXd& u, double r) {
  if (static_cast<std::size_t>(u.size()) != space.size()) throw ConfigError("function size does not match the space");
  if (!(r > 0.0)) throw ConfigError("radius must be positive");
}

std::vector<double> ball_masses(const FiniteSpace& space, double r) {
  std::vector<double> m(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) m[i] = space.ball_mass(i, r);
  return m;
}

double rel(double diff, double scale) { return scale > 0.0 ? std::abs(diff) / scale : std::abs(diff); }

}  // namespace

double average(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  check_finite(space, u, r);
  CompensatedSum s;
  const auto ball = space.ball_members(x, r);
  for (const auto j : ball.indices) s.add(space.mass(j) * u[j]);
  return s.value() / ball.mass;
}

double coaverage(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  check_finite(space, u, r);
  CompensatedSum s;
  for (const auto j : space.ball_members(x, r).indices) s.add(space.mass(j) * u[j] / space.ball_mass(j, r));
  return s.value();
}

double r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  check_finite(space, u, r);
  CompensatedSum s;
  const auto ball = space.ball_members(x, r);
  for (const auto j : ball.indices) s.add(space.mass(j) * (u[j] - u[x]));
  return s.value() / ball.mass / (r * r);
}

double r_colaplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  return (coaverage(space, u, r, x) - u[x]) / (r * r);
}

double symmetrized_r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  check_finite(space, u, r);
  const auto ball = space.ball_members(x, r);
  CompensatedSum s;
  for (const auto j : ball.indices) {
    const double k = 0.5 * (1.0 / ball.mass + 1.0 / space.ball_mass(j, r));
    s.add(k * space.mass(j) * (u[j] - u[x]));
  }
  return s.value() / (r * r);
}

double refined_average(const FiniteSpace& space, const Eigen::VectorXd& u, double r, std::size_t x) {
  check_finite(space, u, r);
  std::vector<std::size_t> order(space.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return space.distance(x, a) < space.distance(x, b); });
  // A_t is constant on (d_k, d_{k+1}]; walk the breakpoints inside [r/2, r].
  CompensatedSum integral;
  double mass = 0.0, sum = 0.0;
  std::size_t k = 0;
  double t = 0.5 * r;
  while (k < order.size() && space.distance(x, order[k]) < t) {
    mass += space.mass(order[k]);
    sum += space.mass(order[k]) * u[order[k]];
    ++k;
  }
  while (t < r) {
    // members with distance < t' for t' in (t, next]
    while (k < order.size() && space.distance(x, order[k]) == t) {
      mass += space.mass(order[k]);
      sum += space.mass(order[k]) * u[order[k]];
      ++k;
    }
    const double next = k < order.size() ? std::min(r, space.distance(x, order[k])) : r;
    integral.add((next - t) * sum / mass);
    t = next;
  }
  return 2.0 / r * integral.value();
}

double energy_density(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r, std::size_t x) {
  check_finite(space, u, r);
  check_finite(space, v, r);
  const auto ball = space.ball_members(x, r);
  CompensatedSum s;
  for (const auto j : ball.indices) s.add(space.mass(j) * (u[j] - u[x]) * (v[j] - v[x]));
  return 0.5 * s.value() / ball.mass / (r * r);
}

double energy(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r) {
  CompensatedSum s;
  for (std::size_t i = 0; i < space.size(); ++i) s.add(space.mass(i) * energy_density(space, u, v, r, i));
  return s.value();
}

double bracket(const FiniteSpace& space, const Eigen::VectorXd& f, const Eigen::VectorXd& g, double r, std::size_t x) {
  const double af = average(space, f, r, x);
  const double ag = average(space, g, r, x);
  const auto ball = space.ball_members(x, r);
  CompensatedSum s;
  for (const auto j : ball.indices) s.add(space.mass(j) * (f[j] - af) * (g[j] - ag));
  return s.value() / ball.mass / (r * r);
}

double density_deviation(const FiniteSpace& space, std::size_t x, std::size_t y, double r) {
  return 1.0 - space.ball_mass(x, r) / space.ball_mass(y, r);
}

Eigen::VectorXd r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r) {
  Eigen::VectorXd out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out[i] = r_laplacian(space, u, r, i);
  return out;
}

Eigen::VectorXd r_colaplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r) {
  check_finite(space, u, r);
  const auto m = ball_masses(space, r);
  Eigen::VectorXd out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (space.distance(i, j) < r) s.add(space.mass(j) * u[j] / m[j]);
    }
    out[i] = (s.value() - u[i]) / (r * r);
  }
  return out;
}

Eigen::VectorXd symmetrized_r_laplacian(const FiniteSpace& space, const Eigen::VectorXd& u, double r) {
  check_finite(space, u, r);
  const auto m = ball_masses(space, r);
  Eigen::VectorXd out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (space.distance(i, j) < r) s.add(0.5 * (1.0 / m[i] + 1.0 / m[j]) * space.mass(j) * (u[j] - u[i]));
    }
    out[i] = s.value() / (r * r);
  }
  return out;
}

std::pair<double, double> green_pairing(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r) {
  const Eigen::VectorXd lu = r_laplacian(space, u, r);
  const Eigen::VectorXd lsv = r_colaplacian(space, v, r);
  CompensatedSum lhs, rhs;
  for (std::size_t i = 0; i < space.size(); ++i) {
    lhs.add(space.mass(i) * v[i] * lu[i]);
    rhs.add(space.mass(i) * u[i] * lsv[i]);
  }
  return {lhs.value(), rhs.value()};
}

double IdentityResiduals::max() const {
  return std::max({green, product_rule, symmetrized_relation, energy_pairing, deviation, self_adjoint});
}

IdentityResiduals identity_residuals(const FiniteSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double r) {
  check_finite(space, u, r);
  check_finite(space, v, r);
  const std::size_t n = space.size();
  const auto m = ball_masses(space, r);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd uv = u.cwiseProduct(v);
  const Eigen::VectorXd lu = r_laplacian(space, u, r);
  const Eigen::VectorXd lv = r_laplacian(space, v, r);
  const Eigen::VectorXd luv = r_laplacian(space, uv, r);
  const Eigen::VectorXd lsu = r_colaplacian(space, u, r);
  const Eigen::VectorXd lsv = r_colaplacian(space, v, r);
  const Eigen::VectorXd ls1 = r_colaplacian(space, ones, r);
  const Eigen::VectorXd ltu = symmetrized_r_laplacian(space, u, r);
  const Eigen::VectorXd ltv = symmetrized_r_laplacian(space, v, r);

  IdentityResiduals res;
  // Green: int v Delta_r u = int u Delta_r^* v
  {
    CompensatedSum l, rr;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      l.add(space.mass(i) * v[i] * lu[i]);
      rr.add(space.mass(i) * u[i] * lsv[i]);
      scale += space.mass(i) * (std::abs(v[i] * lu[i]) + std::abs(u[i] * lsv[i]));
    }
    res.green = rel(l.value() - rr.value(), scale);
  }
  // product rule, pointwise
  {
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = energy_density(space, u, v, r, i);
      const double rhs = u[i] * lv[i] + 2.0 * e + v[i] * lu[i];
      worst = std::max(worst, std::abs(luv[i] - rhs));
      scale = std::max(scale, std::abs(luv[i]) + std::abs(u[i] * lv[i]) + 2.0 * std::abs(e) + std::abs(v[i] * lu[i]));
    }
    res.product_rule = rel(worst, scale);
  }
  // symmetrized relation, pointwise
  {
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rhs = 0.5 * (lu[i] + lsu[i] - u[i] * ls1[i]);
      worst = std::max(worst, std::abs(ltu[i] - rhs));
      scale = std::max(scale, std::abs(ltu[i]) + 0.5 * (std::abs(lu[i]) + std::abs(lsu[i]) + std::abs(u[i] * ls1[i])));
    }
    res.symmetrized_relation = rel(worst, scale);
  }
  // energy pairing: int v Delta~_r u = -E_r(u, v)
  {
    CompensatedSum l, e;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = energy_density(space, u, v, r, i);
      l.add(space.mass(i) * v[i] * ltu[i]);
      e.add(space.mass(i) * ei);
      scale += space.mass(i) * (std::abs(v[i] * ltu[i]) + std::abs(ei));
    }
    res.energy_pairing = rel(l.value() + e.value(), scale);
  }
  // deviation: int v (Delta_r - Delta~_r) u = 1/2 int v(x) avg_{B_r(x)} delta_r(x,y)/r (u(y)-u(x))/r
  {
    CompensatedSum l, rr;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double li = space.mass(i) * v[i] * (lu[i] - ltu[i]);
      CompensatedSum inner;
      for (std::size_t j = 0; j < n; ++j) {
        if (space.distance(i, j) < r) inner.add(space.mass(j) * (1.0 - m[i] / m[j]) * (u[j] - u[i]));
      }
      const double ri = 0.5 * space.mass(i) * v[i] * inner.value() / m[i] / (r * r);
      l.add(li);
      rr.add(ri);
      scale += std::abs(li) + std::abs(ri);
    }
    res.deviation = rel(l.value() - rr.value(), scale);
  }
  // self-adjointness of Delta~_r
  {
    CompensatedSum a, b;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a.add(space.mass(i) * v[i] * ltu[i]);
      b.add(space.mass(i) * u[i] * ltv[i]);
      scale += space.mass(i) * (std::abs(v[i] * ltu[i]) + std::abs(u[i] * ltv[i]));
    }
    res.self_adjoint = rel(a.value() - b.value(), scale);
  }
  return res;
}

// ---------------------------------------------------------------------------
// weighted Euclidean domains

namespace {

struct NodeEval {
  const WeightedEuclidean& space;
  const BallQuadrature& quad;
  PointView x;
  double r;
  Scratch y;

  NodeEval(const WeightedEuclidean& s, const BallQuadrature& q, PointView px, double pr) : space(s), quad(q), x(px), r(pr) {
    if (q.dim() != s.dim() || static_cast<int>(px.size()) != s.dim()) throw ConfigError("quadrature, space and point dimensions differ");
    if (!(pr > 0.0)) throw ConfigError("radius must be positive");
    y.dim = s.dim();
  }
  PointView at(std::size_t i) {
    const auto z = quad.node(i);
    for (int a = 0; a < y.dim; ++a) y.data[a] = x[a] + r * z[a];
    return y.view();
  }
  double w(PointView p) const { return space.weight().is_constant() ? 1.0 : space.weight()(p); }
};

// Ratio sum_i lambda_i a_i / sum_i lambda_i b_i where (a_i, b_i) = fn(y_i).
// Paired rules are treated as one sample per pair for the standard error.
template <class Fn>
Estimate ratio(NodeEval& ev, Fn&& fn) {
  const auto& q = ev.quad;
  const std::size_t n = q.size();
  const bool paired = q.paired();
  const std::size_t step = paired ? 2 : 1;
  const std::size_t units = n / step;
  std::vector<double> as(units), bs(units);
  CompensatedSum sa, sb;
  for (std::size_t k = 0; k < units; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t s = 0; s < step; ++s) {
      const std::size_t i = k * step + s;
      const auto [ai, bi] = fn(ev.at(i));
      a += q.weight(i) * ai;
      b += q.weight(i) * bi;
    }
    as[k] = a;
    bs[k] = b;
    sa.add(a);
    sb.add(b);
  }
  Estimate e;
  e.value = sa.value() / sb.value();
  if (q.mode() != SamplingMode::tensor_grid && units > 1) {
    CompensatedSum var;
    for (std::size_t k = 0; k < units; ++k) {
      const double d = as[k] - e.value * bs[k];
      var.add(d * d);
    }
    // units * var(a - R b) / (units * mean b)^2 / units
    const double uu = static_cast<double>(units);
    e.std_error = std::sqrt(var.value() * uu / (uu - 1.0)) / std::abs(sb.value());
  }
  return e;
}

}  // namespace

Estimate average_with_error(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x) {
  space.require_ball(x, r);
  NodeEval ev(space, quad, x, r);
  return ratio(ev, [&](PointView y) {
    const double w = ev.w(y);
    return std::pair{w * u(y), w};
  });
}

double average(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x) {
  return average_with_error(space, quad, u, r, x).value;
}

Estimate r_laplacian_with_error(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x) {
  space.require_ball(x, r);
  NodeEval ev(space, quad, x, r);
  const double u0 = u(x);
  Estimate e = ratio(ev, [&](PointView y) {
    const double w = ev.w(y);
    return std::pair{w * (u(y) - u0), w};
  });
  e.value /= r * r;
  e.std_error /= r * r;
  return e;
}

double r_laplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x) {
  return r_laplacian_with_error(space, quad, u, r, x).value;
}

namespace {

// sum_j lambda_j w(y + r z_j): mu(B_r(y)) up to the common factor J Leb(B) r^n.
double relative_ball_mass(const WeightedEuclidean& space, const BallQuadrature& inner, PointView y, double r) {
  NodeEval ev(space, inner, y, r);
  if (space.weight().is_constant()) return 1.0;
  CompensatedSum s;
  for (std::size_t j = 0; j < inner.size(); ++j) s.add(inner.weight(j) * ev.w(ev.at(j)));
  return s.value();
}

}  // namespace

double coaverage(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r,
                 PointView x) {
  space.require_ball(x, 2.0 * r);
  NodeEval ev(space, quad, x, r);
  CompensatedSum s;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const auto y = ev.at(i);
    const Point yc(y.begin(), y.end());
    s.add(quad.weight(i) * ev.w(y) * u(y) / relative_ball_mass(space, inner, yc, r));
  }
  return s.value();
}

double r_colaplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r,
                     PointView x) {
  return (coaverage(space, quad, inner, u, r, x) - u(x)) / (r * r);
}

double symmetrized_r_laplacian(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u, double r,
                               PointView x) {
  space.require_ball(x, 2.0 * r);
  NodeEval ev(space, quad, x, r);
  const double u0 = u(x);
  const double mx = relative_ball_mass(space, inner, x, r);
  CompensatedSum s;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const auto y = ev.at(i);
    const Point yc(y.begin(), y.end());
    const double k = 0.5 * (1.0 / mx + 1.0 / relative_ball_mass(space, inner, yc, r));
    s.add(quad.weight(i) * k * ev.w(y) * (u(y) - u0));
  }
  return s.value() / (r * r);
}

double refined_average(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, double r, PointView x, int t_points,
                       int t_panels) {
  if (t_points * t_panels < 4) throw ConfigError("refined_average: at least 4 t-nodes required");
  space.require_ball(x, r);
  return 2.0 / r * integrate_gl([&](double t) { return average(space, quad, u, t, x); }, 0.5 * r, r, t_points, t_panels);
}

double energy_density(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& v, double r, PointView x) {
  space.require_ball(x, r);
  NodeEval ev(space, quad, x, r);
  const double u0 = u(x), v0 = v(x);
  const Estimate e = ratio(ev, [&](PointView y) {
    const double w = ev.w(y);
    return std::pair{w * (u(y) - u0) * (v(y) - v0), w};
  });
  return 0.5 * e.value / (r * r);
}

double bracket(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, const ScalarField& g, double r, PointView x) {
  const double af = average(space, quad, f, r, x);
  const double ag = average(space, quad, g, r, x);
  NodeEval ev(space, quad, x, r);
  const Estimate e = ratio(ev, [&](PointView y) {
    const double w = ev.w(y);
    return std::pair{w * (f(y) - af) * (g(y) - ag), w};
  });
  return e.value / (r * r);
}

double density_deviation(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, PointView y, double r) {
  space.require_ball(x, r);
  space.require_ball(y, r);
  return 1.0 - relative_ball_mass(space, quad, x, r) / relative_ball_mass(space, quad, y, r);
}

double ball_mass(const WeightedEuclidean& space, const BallQuadrature& quad, PointView x, double r, bool quadrature_volume) {
  space.require_ball(x, r);
  NodeEval ev(space, quad, x, r);
  CompensatedSum s;
  for (std::size_t i = 0; i < quad.size(); ++i) s.add(quad.weight(i) * space.weight()(ev.at(i)));
  const double leb = quadrature_volume ? quad.volume_estimate() : space.norm().unit_ball_volume();
  return space.hausdorff_ratio() * leb * std::pow(r, space.dim()) * s.value();
}

double weighted_laplacian_product_form(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, double r, PointView x) {
  const auto flat = space.unweighted();
  const ScalarField& w = space.weight().field();
  const double lfw = r_laplacian(flat, quad, f * w, r, x);
  const double lw = r_laplacian(flat, quad, w, r, x);
  return (lfw - f(x) * lw) / average(flat, quad, w, r, x);
}

double weighted_laplacian_bracket_form(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& f, double r, PointView x) {
  const auto flat = space.unweighted();
  const ScalarField& w = space.weight().field();
  return r_laplacian(flat, quad, f, r, x) + bracket(flat, quad, f, w, r, x) / average(flat, quad, w, r, x);
}

void require_support_inside(const ScalarField& f, const Box& region) {
  const auto s = f.support();
  if (!s) throw DomainError("field '" + f.descriptor() + "' has no compact support");
  for (int a = 0; a < region.dim(); ++a) {
    if (s->lo[a] < region.lo[a] || s->hi[a] > region.hi[a]) {
      throw DomainError("support of '" + f.descriptor() + "' touches the integration region boundary");
    }
  }
}

double energy(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& v, double r,
              const BoxQuadrature& region) {
  require_support_inside(u, region.box());
  require_support_inside(v, region.box());
  CompensatedSum s;
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto x = region.node(k);
    s.add(region.weight(k) * space.weight()(x) * energy_density(space, quad, u, v, r, x));
  }
  return space.hausdorff_ratio() * s.value();
}

std::pair<double, double> green_pairing(const WeightedEuclidean& space, const BallQuadrature& quad, const BallQuadrature& inner, const ScalarField& u,
                                        const ScalarField& v, double r, const BoxQuadrature& region) {
  require_support_inside(u, region.box());
  require_support_inside(v, region.box());
  CompensatedSum lhs, rhs;
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto x = region.node(k);
    const double wx = region.weight(k) * space.weight()(x);
    lhs.add(wx * v(x) * r_laplacian(space, quad, u, r, x));
    rhs.add(wx * u(x) * r_colaplacian(space, quad, inner, v, r, x));
  }
  return {space.hausdorff_ratio() * lhs.value(), space.hausdorff_ratio() * rhs.value()};
}

}  // namespace amv
