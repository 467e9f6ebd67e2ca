#include "amv/weighted/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "amv/core/box_quadrature.hpp"
#include "amv/operators/averaging.hpp"
#include "amv/weighted/moments.hpp"

namespace amv {

namespace {

Eigen::MatrixXd moment_matrix(const Norm& norm) { return second_moment_tensor(norm, 2).matrix(); }

double lp_mean(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  CompensatedSum s;
  for (const double x : v) s.add(std::pow(std::abs(x), p));
  return std::pow(s.value() / static_cast<double>(v.size()), 1.0 / p);
}

// Bounding box of supp phi, checked against the box with room for radius r.
Box bump_region(const WeightedEuclidean& space, const ScalarField& phi, double r) {
  const auto s = phi.support();
  if (!s) throw ConfigError("test function '" + phi.descriptor() + "' has no compact support");
  const Box& box = space.box();
  for (int a = 0; a < space.dim(); ++a) {
    const double reach = r * space.norm().axis_extent(a);
    if (s->lo[a] - reach < box.lo[a] || s->hi[a] + reach > box.hi[a]) {
      throw DomainError("support of '" + phi.descriptor() + "' is closer than the largest radius to the boundary");
    }
  }
  return *s;
}

}  // namespace

CsvTable ConvergenceReport::table() const {
  std::vector<std::string> header;
  const int n = points.empty() ? 0 : static_cast<int>(points.front().x.size());
  for (int a = 0; a < n; ++a) header.push_back("x" + std::to_string(a + 1));
  for (const char* c : {"limit", "error", "reference", "deviation", "pass"}) header.emplace_back(c);
  CsvTable t(header);
  for (const auto& pc : points) {
    std::vector<std::string> row;
    for (const double c : pc.x) row.push_back(format_number(c));
    row.push_back(format_number(pc.limit.value));
    row.push_back(format_number(pc.limit.error));
    row.push_back(format_number(pc.reference));
    row.push_back(format_number(pc.deviation));
    row.emplace_back(pc.pass ? "1" : "0");
    t.add_row(row);
  }
  return t;
}

ConvergenceReport convergence_check(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const std::vector<Point>& points,
                                    const RadiiSchedule& schedule, double p, const ConvergenceOptions& options) {
  if (!u.has_hessian()) throw ConfigError("convergence_check: '" + u.descriptor() + "' has no Hessian");
  const Eigen::MatrixXd m = moment_matrix(space.norm());
  const auto& radii = schedule.radii();
  const auto limit_at = [&](PointView x) {
    space.require_ball(x, schedule.r0());
    std::vector<double> vals(radii.size()), errs(radii.size());
    bool any_err = false;
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const auto e = r_laplacian_with_error(space, quad, u, radii[j], x);
      vals[j] = e.value;
      errs[j] = e.std_error;
      any_err = any_err || e.std_error > 0.0;
    }
    return extrapolate_limit(radii, vals, options.model, any_err ? errs : std::vector<double>{});
  };

  ConvergenceReport rep;
  rep.p = p;
  rep.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    auto& pc = rep.points[i];
    pc.x = points[i];
    pc.limit = limit_at(pc.x);
    pc.reference = apply_Lw(u, space.weight(), m, pc.x);
    pc.deviation = std::abs(pc.limit.value - pc.reference);
    pc.pass = pc.deviation <= std::max(options.rel_tol * std::abs(pc.reference), options.abs_floor);
  });
  rep.pass = std::all_of(rep.points.begin(), rep.points.end(), [](const PointConvergence& pc) { return pc.pass; });

  if (options.lp_region.dim() > 0) {
    const Grid sub = Grid::uniform(options.lp_region, options.lp_cells);
    std::vector<double> diff(sub.size()), ref(sub.size());
    parallel_for(sub.size(), [&](std::size_t k) {
      const Point x = sub.point(k);
      ref[k] = apply_Lw(u, space.weight(), m, x);
      diff[k] = limit_at(x).value - ref[k];
    });
    rep.lp_relative_deviation = lp_mean(diff, p) / std::max(lp_mean(ref, p), options.abs_floor);
  }
  return rep;
}

double pair_with_bump(const WeightedEuclidean& space, const ScalarField& phi, const ScalarField& g, int panels) {
  const Box region = bump_region(space, phi, 0.0);
  const BoxQuadrature rule(region, panels);
  std::vector<double> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t k) {
    const auto x = rule.node(k);
    const double ph = phi(x);
    terms[k] = ph == 0.0 ? 0.0 : rule.weight(k) * ph * space.weight()(x) * g(x);
  });
  CompensatedSum s;
  for (const double t : terms) s.add(t);
  return space.hausdorff_ratio() * s.value();
}

WeakAmvProfile weak_amv_test(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const ScalarField& phi,
                             const RadiiSchedule& schedule, int panels, double u_sup) {
  const Box region = bump_region(space, phi, schedule.r0());
  const BoxQuadrature rule(region, panels);
  const auto& radii = schedule.radii();
  WeakAmvProfile prof;
  prof.phi_mass = pair_with_bump(space, phi, ScalarField::constant(1.0), panels);
  if (u_sup < 0.0) {
    // sup over the rule nodes when no bound is supplied
    u_sup = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) u_sup = std::max(u_sup, std::abs(u(rule.node(k))));
  }
  prof.scale = std::abs(prof.phi_mass) * u_sup;

  const std::size_t nr = radii.size(), nk = rule.size();
  std::vector<double> val(nr * nk, 0.0), var(nr * nk, 0.0);
  parallel_for(nk, [&](std::size_t k) {
    const auto x = rule.node(k);
    const double ph = phi(x);
    if (ph == 0.0) return;
    const double c = rule.weight(k) * ph * space.weight()(x);
    for (std::size_t j = 0; j < nr; ++j) {
      const auto e = r_laplacian_with_error(space, quad, u, radii[j], x);
      val[j * nk + k] = c * e.value;
      var[j * nk + k] = c * c * e.std_error * e.std_error;
    }
  });
  std::vector<double> vals(nr), errs(nr);
  bool any_err = false;
  for (std::size_t j = 0; j < nr; ++j) {
    CompensatedSum s, v;
    for (std::size_t k = 0; k < nk; ++k) {
      s.add(val[j * nk + k]);
      v.add(var[j * nk + k]);
    }
    vals[j] = space.hausdorff_ratio() * s.value();
    // node estimates use independent streams only for Monte-Carlo rules
    errs[j] = space.hausdorff_ratio() * std::sqrt(v.value());
    any_err = any_err || errs[j] > 0.0;
    prof.rows.push_back({radii[j], vals[j], errs[j]});
  }
  prof.limit = extrapolate_limit(radii, vals, ExtrapolationModel::even_powers, any_err ? errs : std::vector<double>{});
  return prof;
}

AmvGridNorms amv_grid_norms(const WeightedEuclidean& space, const BallQuadrature& quad, const ScalarField& u, const Box& region, int cells, double r) {
  const Grid sub = Grid::uniform(region, cells);
  std::vector<double> v(sub.size());
  parallel_for(sub.size(), [&](std::size_t k) {
    const Point x = sub.point(k);
    space.require_ball(x, r);
    v[k] = r_laplacian(space, quad, u, r, x);
  });
  return {lp_mean(v, 2.0), lp_mean(v, std::numeric_limits<double>::infinity())};
}

Eigen::VectorXd grid_gradient(const GridFunction& u, std::size_t node) {
  const Grid& g = u.grid();
  const auto mi = g.multi_index(node);
  Eigen::VectorXd grad(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.h(a);
    const auto s = static_cast<std::ptrdiff_t>(g.stride(a));
    const auto k = static_cast<std::ptrdiff_t>(node);
    const auto at = [&](std::ptrdiff_t off) { return u[static_cast<std::size_t>(k + off * s)]; };
    if (mi[a] == 0) {
      grad[a] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    } else if (mi[a] == g.cells(a)) {
      grad[a] = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
    } else {
      grad[a] = (at(1) - at(-1)) / (2.0 * h);
    }
  }
  return grad;
}

Record CheegerComparison::record() const {
  Record rec;
  rec.set("target", target);
  rec.set("lw_limit", lw_profile.limit.value);
  rec.set("lw_limit_error", lw_profile.limit.error);
  rec.set("lw_smallest_radius_value", lw_profile.rows.empty() ? 0.0 : lw_profile.rows.back().value);
  rec.set("lw_scale", lw_profile.scale);
  rec.set("cheeger_limit", cheeger_profile.limit.value);
  rec.set("cheeger_limit_error", cheeger_profile.limit.error);
  rec.set("cheeger_scale", cheeger_profile.scale);
  rec.set("cheeger_relative_deviation", target != 0.0 ? std::abs(cheeger_profile.limit.value - target) / std::abs(target) : 0.0);
  for (std::size_t i = 0; i < warnings.size(); ++i) rec.set("warning_" + std::to_string(i + 1), warnings[i]);
  return rec;
}

CheegerComparison amv_vs_cheeger_report(const Grid& grid, const ScalarField& f, const ScalarField& phi, const ScalarField& boundary,
                                        const BallQuadrature& quad, const RadiiSchedule& schedule, const CheegerOptions& options) {
  const int n = grid.dim();
  const Norm norm = Norm::euclidean(n);
  const WeightField w(f.exp_of(-1.0));
  const WeightedEuclidean space(grid.box(), norm, w);
  const Eigen::MatrixXd m = moment_matrix(norm);

  const auto lw_sys = assemble_dirichlet(grid, w, m, ScalarField::constant(0.0), boundary, options.upwind);
  const auto lw = solve_dirichlet(lw_sys, options.solve);
  const auto ch_sys = assemble_elliptic(
      grid, Eigen::MatrixXd::Identity(n, n), [&f](PointView x) -> Eigen::VectorXd { return -f.gradient(x); }, ScalarField::constant(0.0), boundary,
      options.upwind);
  const auto ch = solve_dirichlet(ch_sys, options.solve);

  CheegerComparison out{lw.solution, ch.solution, {}, {}, 0.0, {}};
  for (const auto& s : lw_sys.warnings) out.warnings.push_back("L_w system: " + s);
  for (const auto& s : ch_sys.warnings) out.warnings.push_back("Cheeger system: " + s);

  const double lw_sup = lw.solution.max_abs(), ch_sup = ch.solution.max_abs();
  out.lw_profile = weak_amv_test(space, quad, out.lw_solution.as_field("lw_solution"), phi, schedule, options.panels, lw_sup);
  out.cheeger_profile = weak_amv_test(space, quad, out.cheeger_solution.as_field("cheeger_solution"), phi, schedule, options.panels, ch_sup);

  // -(1/(2(n+2))) sum phi <grad f, grad u> w h^n over nodes in supp phi
  const auto s = phi.support();
  const auto nodes = grid.nodes_in(*s);
  std::vector<double> terms(nodes.size());
  double cell = 1.0;
  for (int a = 0; a < n; ++a) cell *= grid.h(a);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Point x = grid.point(nodes[i]);
    const double ph = phi(x);
    if (ph == 0.0) return;
    terms[i] = ph * w(x) * f.gradient(x).dot(grid_gradient(out.cheeger_solution, nodes[i]));
  });
  CompensatedSum acc;
  for (const double t : terms) acc.add(t);
  out.target = -space.hausdorff_ratio() * cell * acc.value() / (2.0 * (n + 2));
  return out;
}

}  // namespace amv
