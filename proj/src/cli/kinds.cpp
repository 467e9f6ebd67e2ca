#include <algorithm>
#include <cmath>
#include <numbers>

#include "amv/core/finite_space.hpp"
#include "amv/core/multi_index.hpp"
#include "amv/geometry/profiles.hpp"
#include "amv/heisenberg/h1.hpp"
#include "amv/operators/averaging.hpp"
#include "amv/operators/profiles.hpp"
#include "amv/polynomials/mvp.hpp"
#include "amv/weighted/elliptic.hpp"
#include "amv/weighted/experiments.hpp"
#include "amv/weighted/moments.hpp"
#include "context.hpp"

namespace amv::cli {

namespace {

std::string fmt(double v) { return format_number(v); }

std::string within(double value, double bound) { return fmt(value) + " <= " + fmt(bound); }

CsvTable rows_table(const std::vector<RadiusRow>& rows) { return radius_table(rows); }

// ---- identities -------------------------------------------------------------

void identities(Context& ctx) {
  const long points = ctx.count("space.points", 50, 2);
  const int d = ctx.dim(3);
  const long trials = ctx.count("trials", 100);
  const auto range = ctx.cfg.numbers("radius.range", {0.2, 0.8});
  const double tol = ctx.cfg.number("tolerance", 1e-12);
  if (range.size() != 2 || !(range[0] > 0.0 && range[0] <= range[1])) ctx.issue("radius.range", "expected 0 < min <= max (fractions of the diameter)");
  if (ctx.dry) return;

  CsvTable t({"trial", "radius", "green", "product_rule", "symmetrized_relation", "energy_pairing", "deviation", "self_adjoint"});
  IdentityResiduals worst;
  for (long k = 0; k < trials; ++k) {
    const auto tk = static_cast<std::uint64_t>(k);
    const FiniteSpace space = FiniteSpace::random(static_cast<std::size_t>(points), d, ctx.seed({10, tk}));
    Rng rng(ctx.seed({11, tk}));
    Eigen::VectorXd u(points), v(points);
    for (long i = 0; i < points; ++i) u[i] = rng.uniform(-1.0, 1.0);
    for (long i = 0; i < points; ++i) v[i] = rng.uniform(-1.0, 1.0);
    const double r = rng.uniform(range[0], range[1]) * space.diameter();
    const auto res = identity_residuals(space, u, v, r);
    t.add_row(std::vector<double>{static_cast<double>(k), r, res.green, res.product_rule, res.symmetrized_relation, res.energy_pairing, res.deviation,
                                  res.self_adjoint});
    worst.green = std::max(worst.green, res.green);
    worst.product_rule = std::max(worst.product_rule, res.product_rule);
    worst.symmetrized_relation = std::max(worst.symmetrized_relation, res.symmetrized_relation);
    worst.energy_pairing = std::max(worst.energy_pairing, res.energy_pairing);
    worst.deviation = std::max(worst.deviation, res.deviation);
    worst.self_adjoint = std::max(worst.self_adjoint, res.self_adjoint);
  }
  ctx.results.set("max_residual.green", worst.green);
  ctx.results.set("max_residual.product_rule", worst.product_rule);
  ctx.results.set("max_residual.symmetrized_relation", worst.symmetrized_relation);
  ctx.results.set("max_residual.energy_pairing", worst.energy_pairing);
  ctx.results.set("max_residual.deviation", worst.deviation);
  ctx.results.set("max_residual.self_adjoint", worst.self_adjoint);
  ctx.check("identities.green", worst.green <= tol, within(worst.green, tol));
  ctx.check("identities.product_rule", worst.product_rule <= tol, within(worst.product_rule, tol));
  ctx.check("identities.symmetrized_relation", worst.symmetrized_relation <= tol, within(worst.symmetrized_relation, tol));
  ctx.check("identities.energy_pairing", worst.energy_pairing <= tol, within(worst.energy_pairing, tol));
  ctx.check("identities.deviation", worst.deviation <= tol, within(worst.deviation, tol));
  ctx.table("identities", std::move(t));
}

// ---- moments ----------------------------------------------------------------

void moments(Context& ctx) {
  const int d = ctx.dim(2);
  Norm norm = Norm::euclidean(d);
  try {
    norm = make_norm(ctx.cfg.text("space.norm", "lp:2"), d);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'space.norm': ") + e.what());
  }
  const long order = ctx.cfg.integer("order", 2);
  if (order < 2 || order > 8) ctx.issue("order", "moment order must lie in [2, 8]");
  const long samples = ctx.count("samples", 1000000, 0);
  const double tol = ctx.cfg.number("tolerance", 1e-9);
  const double z_max = ctx.cfg.number("monte_carlo.z_max", 3.0);
  if (ctx.dry) return;

  MomentOptions exact;
  exact.method = MomentMethod::automatic;
  exact.samples = samples > 0 ? static_cast<std::size_t>(samples) : 1000000;
  exact.seed = ctx.seed({20});
  const MomentTensor m = second_moment_tensor(norm, static_cast<int>(order), exact);
  std::optional<MomentTensor> mc;
  if (samples > 0) {
    MomentOptions o;
    o.method = MomentMethod::monte_carlo;
    o.samples = static_cast<std::size_t>(samples);
    o.seed = ctx.seed({21});
    mc = second_moment_tensor(norm, static_cast<int>(order), o);
  }
  ctx.results.set("method", m.method());

  std::vector<std::string> header;
  for (int i = 0; i < d; ++i) header.push_back("e" + std::to_string(i + 1));
  for (const char* c : {"value", "std_error", "monte_carlo", "monte_carlo_std_error"}) header.emplace_back(c);
  CsvTable t(header);
  for (int k = 1; k <= order; ++k) {
    for (const auto& alpha : multi_indices(d, k)) {
      std::vector<std::string> row;
      for (const int a : alpha) row.push_back(std::to_string(a));
      row.push_back(fmt(m(alpha)));
      row.push_back(fmt(m.std_error(alpha)));
      row.push_back(mc ? fmt((*mc)(alpha)) : "");
      row.push_back(mc ? fmt(mc->std_error(alpha)) : "");
      t.add_row(row);
    }
  }
  const Eigen::MatrixXd mm = m.matrix();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) ctx.results.set("m" + std::to_string(i + 1) + std::to_string(j + 1), mm(i, j));
  }

  // independent references: I/(n+2) for the Euclidean ball, I/3 for the cube
  std::optional<double> diag;
  if (norm.is_euclidean()) diag = 1.0 / (d + 2.0);
  if (norm.is_sup()) diag = 1.0 / 3.0;
  if (diag) {
    const double dev = (mm - *diag * Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    ctx.results.set("reference_deviation", dev);
    ctx.check("moments.reference", dev <= tol, within(dev, tol));
  }
  if (mc) {
    const Eigen::MatrixXd mcm = mc->matrix();
    double z = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        MultiIndex a(d, 0);
        ++a[i];
        ++a[j];
        z = std::max(z, std::abs(mcm(i, j) - mm(i, j)) / mc->std_error(a));
      }
    }
    ctx.results.set("monte_carlo_max_z", z);
    ctx.check("moments.monte_carlo", z <= z_max, within(z, z_max) + " standard errors");
  }
  ctx.table("moments", std::move(t));
}

// ---- convergence ------------------------------------------------------------

void convergence(Context& ctx) {
  const WeightedEuclidean space = ctx.space();
  const ScalarField u = ctx.field("u");
  const auto pts = ctx.points("points", space.dim(), {space.box().center()});
  double clear = std::numeric_limits<double>::infinity();
  for (const auto& x : pts) clear = std::min(clear, space.clearance(x));
  const RadiiSchedule sched = ctx.schedule(0.2 * clear, 0.7, 12);
  for (const auto& x : pts) ctx.require_clearance(space, x, sched.r0(), "schedule.r0");
  ConvergenceOptions opt;
  opt.model = ctx.model("even_powers");
  opt.rel_tol = ctx.cfg.number("rel_tol", 1e-2);
  opt.abs_floor = ctx.cfg.number("abs_floor", 1e-3);
  const double p = ctx.cfg.number("p", 2.0);
  if (ctx.cfg.has("lp.region")) opt.lp_region = ctx.box("lp.region", space.dim(), "0,1");
  opt.lp_cells = static_cast<int>(ctx.cfg.integer("lp.cells", 4));
  if (!u.has_hessian()) ctx.issue("u", "the reference L_w u needs a field with a Hessian");
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const auto rep = convergence_check(space, quad, u, pts, sched, p, opt);
  CsvTable radii({"point", "radius", "value", "std_error"});
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& l = rep.points[i].limit;
    for (std::size_t j = 0; j < l.radii.size(); ++j) {
      radii.add_row(std::vector<double>{static_cast<double>(i), l.radii[j], l.values[j], l.std_errors.empty() ? 0.0 : l.std_errors[j]});
    }
    ctx.results.append(l.record(), "point" + std::to_string(i + 1) + ".limit.");
    ctx.results.set("point" + std::to_string(i + 1) + ".reference", rep.points[i].reference);
  }
  double worst = 0.0;
  for (const auto& pc : rep.points) worst = std::max(worst, pc.deviation / std::max(opt.rel_tol * std::abs(pc.reference), opt.abs_floor));
  ctx.results.set("worst_deviation_over_tolerance", worst);
  if (!opt.lp_region.lo.empty()) ctx.results.set("lp_relative_deviation", rep.lp_relative_deviation);
  ctx.check("convergence.pointwise", rep.pass, "max deviation / tolerance = " + fmt(worst));
  ctx.table("convergence", rep.table());
  ctx.table("convergence_radii", std::move(radii));
}

// ---- heisenberg ---------------------------------------------------------------

void heisenberg_bpz(Context& ctx) {
  std::vector<ScalarField> fs;
  for (const auto& d : ctx.cfg.list("functions", {"monomial:2,0,0", "monomial:1,0,1", "monomial:0,0,2"})) {
    try {
      fs.push_back(make_field(d));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'functions': ") + e.what());
    }
  }
  std::vector<H1Point> pts;
  for (const auto& p : ctx.points("points", 3, {{0.5, 0.3, 0.2}, {-0.4, 0.7, 1.0}, {1.0, -0.5, -0.3}})) pts.push_back({p[0], p[1], p[2]});
  const RadiiSchedule sched = ctx.schedule(0.5, 0.7, 10);
  const long samples = ctx.count("samples", 1000000, 2);
  const double tol = ctx.cfg.number("tolerance", 0.02);
  const long vol_samples = ctx.count("volume.samples", 1000000, 0);
  const double vol_tol = ctx.cfg.number("volume.tolerance", 0.005);
  const double ks_r = ctx.cfg.number("ks.radius", 0.0);
  if (ks_r < 0.0) ctx.issue("ks.radius", "must be non-negative");
  if (ctx.dry) return;

  const double target = 1.0 / (3.0 * std::numbers::pi);
  const auto est = bpz_constant_estimate(fs, pts, sched, static_cast<std::size_t>(samples), ctx.seed({30}));
  ctx.results.append(est.record(), "bpz.");
  ctx.results.set("bpz.target", target);
  const double rel = std::abs(est.c_hat - target) / target;
  ctx.results.set("bpz.relative_deviation", rel);
  ctx.check("bpz.constant", rel <= tol, "|c_hat - 1/(3 pi)| / (1/(3 pi)) = " + within(rel, tol));
  ctx.table("bpz", est.table());

  if (vol_samples > 0) {
    const auto v = koranyi_volume_mc(1.0, static_cast<std::size_t>(vol_samples), ctx.seed({31}));
    const double exact = std::numbers::pi * std::numbers::pi / 2.0;
    const double vrel = std::abs(v.value - exact) / exact;
    ctx.results.set("volume.estimate", v.value);
    ctx.results.set("volume.std_error", v.std_error);
    ctx.results.set("volume.exact", exact);
    ctx.check("bpz.unit_ball_volume", vrel <= vol_tol, "relative deviation " + within(vrel, vol_tol));
  }
  if (ks_r > 0.0) {
    CsvTable t({"function", "x", "y", "t", "density", "std_error", "horizontal_gradient_sq", "ratio"});
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto k = h1_ks_density(fs[i], pts[j], ks_r, static_cast<std::size_t>(samples), ctx.seed({32, i, j}));
        t.add_row(std::vector<std::string>{fs[i].descriptor(), fmt(pts[j].x), fmt(pts[j].y), fmt(pts[j].t), fmt(k.value), fmt(k.std_error),
                                           fmt(k.horizontal_gradient_sq), k.ratio_defined ? fmt(k.ratio) : "nan"});
      }
    }
    ctx.table("ks_density", std::move(t));
  }
}

// ---- dirichlet ----------------------------------------------------------------

void dirichlet(Context& ctx) {
  const WeightedEuclidean space = ctx.space();
  const std::string op = ctx.cfg.text("operator", "lw");
  if (op != "lw" && op != "cheeger") throw ConfigError("key 'operator': expected lw or cheeger");
  const bool cheeger = op == "cheeger";
  const ScalarField f = cheeger ? ctx.field("f") : ScalarField::constant(0.0);
  if (cheeger && !space.weight().is_constant()) ctx.issue("space.weight", "the cheeger operator takes its drift from 'f'");
  const bool manufactured = ctx.cfg.has("exact");
  const ScalarField exact = manufactured ? ctx.field("exact") : ScalarField();
  if (manufactured && !exact.has_hessian()) ctx.issue("exact", "a manufactured solution needs a Hessian");
  const ScalarField rhs_given = manufactured ? ScalarField() : ctx.field("rhs", "const:0");
  const ScalarField boundary = manufactured ? exact : ctx.field("boundary");
  const long cells = ctx.count("cells", 16, 2);
  const long levels = ctx.count("levels", manufactured ? 2 : 1, 1);
  if (cells << (levels - 1) > 4096) ctx.issue("levels", "finest grid exceeds 4096 cells per axis");
  const auto range = ctx.cfg.numbers("ratio.range", {3.5, 4.5});
  if (range.size() != 2 || range[0] > range[1]) ctx.issue("ratio.range", "expected min,max");
  SolveOptions so;
  so.tol = ctx.cfg.number("solver.tol", 1e-10);
  so.max_iter = static_cast<int>(ctx.cfg.integer("solver.max_iter", 20000));
  const std::string sk = ctx.cfg.text("solver.kind", "automatic");
  if (sk == "direct") so.solver = SolverKind::direct;
  else if (sk == "bicgstab") so.solver = SolverKind::bicgstab;
  else if (sk != "automatic") throw ConfigError("key 'solver.kind': expected automatic, direct or bicgstab");
  Upwinding up;
  try {
    up = parse_upwinding(ctx.cfg.text("upwinding", "when_needed"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'upwinding': ") + e.what());
  }

  const Eigen::MatrixXd m = cheeger ? Eigen::MatrixXd::Identity(space.dim(), space.dim()) : ctx.moment_matrix(space.norm());
  const WeightField w = space.weight();
  const Grid coarse(space.box(), std::vector<int>(space.dim(), static_cast<int>(cells)));
  if (cheeger) {
    ctx.peclet(coarse, m, [&f](PointView x) -> Eigen::VectorXd { return -f.gradient(x); }, up, "cells");
  } else {
    ctx.peclet(coarse, m, [&w, &m](PointView x) -> Eigen::VectorXd { return 2.0 * m * w.gradient(x) / w(x); }, up, "cells");
  }
  if (ctx.dry) return;

  ScalarField rhs = rhs_given;
  if (manufactured) {
    if (cheeger) {
      rhs = ScalarField::from_callable(
          [exact, f](PointView x) { return exact.hessian(x).trace() - f.gradient(x).dot(exact.gradient(x)); }, "manufactured", space.dim());
    } else {
      rhs = ScalarField::from_callable([exact, w, m](PointView x) { return apply_Lw(exact, w, m, x); }, "manufactured", space.dim());
    }
  }

  CsvTable errors({"cells", "h", "max_error", "ratio", "relative_residual", "iterations"});
  std::vector<double> errs;
  std::optional<GridFunction> finest;
  for (long level = 0; level < levels; ++level) {
    const Grid g(space.box(), std::vector<int>(space.dim(), static_cast<int>(cells << level)));
    const EllipticSystem sys = cheeger ? assemble_elliptic(g, m, [&f](PointView x) -> Eigen::VectorXd { return -f.gradient(x); }, rhs, boundary, up)
                                       : assemble_dirichlet(g, w, m, rhs, boundary, up);
    const SolveReport sol = solve_dirichlet(sys, so);
    const std::string pre = "level" + std::to_string(level + 1) + ".";
    ctx.results.set(pre + "cells", static_cast<long long>(cells << level));
    ctx.results.set(pre + "method", sol.method);
    ctx.results.set(pre + "relative_residual", sol.relative_residual);
    ctx.results.set(pre + "upwinded_nodes", static_cast<long long>(sys.upwinded_nodes));
    ctx.results.set(pre + "dominant_rows", static_cast<long long>(sys.dominant_rows));
    ctx.results.set(pre + "interior_rows", static_cast<long long>(sys.interior_rows));
    double err = std::numeric_limits<double>::quiet_NaN();
    if (manufactured) {
      err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(sol.solution[i] - exact(g.point(i))));
      ctx.results.set(pre + "max_error", err);
    }
    const double ratio = errs.empty() || !manufactured ? std::numeric_limits<double>::quiet_NaN() : errs.back() / err;
    errs.push_back(err);
    errors.add_row(std::vector<double>{static_cast<double>(cells << level), g.max_h(), err, ratio, sol.relative_residual,
                                       static_cast<double>(sol.iterations)});
    finest = sol.solution;
  }
  if (manufactured && levels >= 2) {
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double ratio = errs[i - 1] / errs[i];
      ctx.check("dirichlet.halving_ratio." + std::to_string(i), ratio >= range[0] && ratio <= range[1],
                "error ratio " + fmt(ratio) + " in [" + fmt(range[0]) + ", " + fmt(range[1]) + "]");
    }
  }
  ctx.table("errors", std::move(errors));
  CsvTable sol_t([&] {
    std::vector<std::string> h{"index"};
    for (int i = 0; i < space.dim(); ++i) h.push_back("x" + std::to_string(i + 1));
    h.emplace_back("value");
    return h;
  }());
  for (std::size_t i = 0; i < finest->grid().size(); ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (const double c : finest->grid().point(i)) row.push_back(c);
    row.push_back((*finest)[i]);
    sol_t.add_row(row);
  }
  ctx.table("solution", std::move(sol_t));
}

// ---- weak amv -----------------------------------------------------------------

void weak_amv(Context& ctx) {
  const WeightedEuclidean space = ctx.space();
  const bool solve = ctx.cfg.flag("solve", false);
  const ScalarField phi = ctx.bump(0.25, space.box().center());
  const RadiiSchedule sched = ctx.schedule(0.1, 0.7, 6);
  ctx.require_support(space, phi, sched.r0(), "schedule.r0");
  const long panels = ctx.count("panels", 8);
  const double tol = ctx.cfg.number("tolerance", solve ? 1e-2 : 0.02);
  ScalarField u;
  ScalarField boundary;
  long cells = 0;
  if (solve) {
    boundary = ctx.field("boundary");
    cells = ctx.count("cells", 64, 4);
  } else {
    u = ctx.field("u");
    if (!u.has_hessian()) ctx.issue("u", "the target int phi L_w u needs a field with a Hessian");
  }
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const Eigen::MatrixXd m = ctx.moment_matrix(space.norm());
  if (solve) {
    const Grid g(space.box(), std::vector<int>(space.dim(), static_cast<int>(cells)));
    const auto sol = solve_dirichlet(assemble_dirichlet(g, space.weight(), m, ScalarField::constant(0.0), boundary));
    ctx.results.set("solve.relative_residual", sol.relative_residual);
    u = sol.solution.as_field("L_w solution");
  }
  const auto prof = weak_amv_test(space, quad, u, phi, sched, static_cast<int>(panels));
  ctx.results.append(prof.limit.record(), "limit.");
  ctx.results.set("scale", prof.scale);
  ctx.results.set("phi_mass", prof.phi_mass);
  if (solve) {
    const double last = std::abs(prof.rows.back().value);
    ctx.check("weak_amv.vanishing", last <= tol * prof.scale, "|pairing at r_min| = " + within(last, tol * prof.scale));
  } else {
    const WeightField& w = space.weight();
    const double target = pair_with_bump(space, phi, ScalarField::from_callable([u, w, m](PointView x) { return apply_Lw(u, w, m, x); }, "L_w u",
                                                                                 space.dim()),
                                         static_cast<int>(panels));
    ctx.results.set("target", target);
    const double dev = std::abs(prof.limit.value - target);
    const double bound = std::max(tol * std::abs(target), 1e-3 * prof.scale);
    ctx.check("weak_amv.limit", dev <= bound, "|limit - int phi L_w u| = " + within(dev, bound));
  }
  ctx.table("weak_amv", rows_table(prof.rows));
}

// ---- amv vs cheeger -------------------------------------------------------------

void amv_vs_cheeger(Context& ctx) {
  const int d = ctx.dim(2);
  const Box b = ctx.box("space.box", d, "0,1");
  const WeightedEuclidean space(b, Norm::euclidean(d));
  const long cells = ctx.count("cells", 64, 4);
  const ScalarField f = ctx.field("f", "coord:0");
  const ScalarField boundary = ctx.field("boundary", "coord:0");
  const ScalarField phi = ctx.bump(0.25, b.center());
  const RadiiSchedule sched = ctx.schedule(0.1, 0.7, 6);
  ctx.require_support(space, phi, sched.r0(), "schedule.r0");
  CheegerOptions opt;
  opt.panels = static_cast<int>(ctx.count("panels", 8));
  try {
    opt.upwind = parse_upwinding(ctx.cfg.text("upwinding", "when_needed"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'upwinding': ") + e.what());
  }
  const double vanish = ctx.cfg.number("vanishing_tolerance", 1e-2);
  const double target_tol = ctx.cfg.number("target_tolerance", 0.05);
  const double separation = ctx.cfg.number("separation", 10.0);
  const Grid g(b, std::vector<int>(d, static_cast<int>(cells)));
  ctx.peclet(g, Eigen::MatrixXd::Identity(d, d), [&f](PointView x) -> Eigen::VectorXd { return -f.gradient(x); }, opt.upwind, "cells");
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const auto rep = amv_vs_cheeger_report(g, f, phi, boundary, quad, sched, opt);
  ctx.results.append(rep.record());
  const double scale = rep.lw_profile.scale;
  const double last = std::abs(rep.lw_profile.rows.back().value);
  const double dev = std::abs(rep.cheeger_profile.limit.value - rep.target);
  ctx.check("dichotomy.lw_vanishes", last <= vanish * scale, "|pairing at r_min| = " + within(last, vanish * scale));
  ctx.check("dichotomy.cheeger_target", dev <= target_tol * std::abs(rep.target), "|limit - target| = " + within(dev, target_tol * std::abs(rep.target)));
  ctx.check("dichotomy.separation", std::abs(rep.target) > separation * vanish * scale,
            "|target| = " + fmt(std::abs(rep.target)) + " > " + fmt(separation * vanish * scale));
  ctx.table("lw_profile", rows_table(rep.lw_profile.rows));
  ctx.table("cheeger_profile", rows_table(rep.cheeger_profile.rows));
}

// ---- mm boundary ------------------------------------------------------------------

void mm_boundary(Context& ctx) {
  const WeightedEuclidean space = ctx.space("-1,1");
  Point c = space.box().center();
  c[0] += 0.3;
  const ScalarField phi = ctx.bump(0.4, c);
  const RadiiSchedule sched = ctx.schedule(0.2, 0.7, 8);
  ctx.require_support(space, phi, sched.r0(), "schedule.r0");
  const long panels = ctx.count("panels", 6);
  const std::string expect = ctx.cfg.text("expect", "any");
  if (expect != "any" && expect != "vanishing" && expect != "non-vanishing" && expect != "inconclusive") {
    ctx.issue("expect", "expected any, vanishing, non-vanishing or inconclusive");
  }
  const double pred_tol = ctx.cfg.number("prediction_tolerance", 0.1);
  const long hsamples = ctx.count("hausdorff.samples", 0, 0);
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const auto rep = mm_boundary_defect(space, quad, phi, sched, static_cast<int>(panels));
  ctx.results.append(rep.record());
  if (expect != "any") {
    ctx.check("mm_boundary.verdict", to_string(rep.verdict) == expect, "verdict " + to_string(rep.verdict) + ", expected " + expect);
  }
  if (expect == "non-vanishing") {
    const double dev = std::abs(rep.rescaled_limit.value - rep.predicted_rescaled_limit);
    const double bound = pred_tol * std::abs(rep.predicted_rescaled_limit);
    ctx.check("mm_boundary.prediction", dev <= bound, "|limit - prediction| = " + within(dev, bound));
  }
  if (hsamples > 0) {
    const auto h = norm_hausdorff_ratio(space.norm(), static_cast<std::size_t>(hsamples), ctx.seed({40}));
    ctx.results.append(h.record(), "hausdorff.");
  }
  ctx.table("mm_boundary", rep.table());
}

// ---- bishop-gromov ----------------------------------------------------------------

void bg_profile(Context& ctx) {
  const WeightedEuclidean space = ctx.space("-1,1");
  const Point x = ctx.point("point", space.dim(), space.box().center());
  const double k = ctx.cfg.number("K", 0.0);
  const double n = ctx.cfg.number("N", space.dim());
  if (!(n >= 1.0)) ctx.issue("N", "must be at least 1");
  const RadiiSchedule sched = ctx.schedule(0.5 * space.clearance(x), 0.8, 12);
  ctx.require_clearance(space, x, sched.r0(), "schedule.r0");
  const std::string expect = ctx.cfg.text("expect", "any");
  const double const_tol = ctx.cfg.number("constant_tolerance", 1e-12);
  const double r_max = ctx.cfg.number("bound.r_max", 0.0);
  const long probes = ctx.cfg.integer("bound.probes", 12);
  if (r_max < 0.0) ctx.issue("bound.r_max", "must be non-negative");
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const ComparisonProfile prof(k, n);
  const auto mono = bg_monotonicity_check(space, quad, x, prof, sched);
  ctx.results.set("verdict", mono.verdict());
  ctx.results.set("spread", mono.spread);
  if (expect == "constant") {
    ctx.check("bg.constant", mono.spread <= const_tol, "spread " + within(mono.spread, const_tol));
  } else if (expect != "any") {
    ctx.check("bg.verdict", mono.verdict() == expect, "verdict " + mono.verdict() + ", expected " + expect);
  }
  if (r_max > 0.0) {
    const auto fit = comparison_bound_fit(prof, r_max, static_cast<int>(probes));
    ctx.results.set("bound.leading", fit.leading);
    ctx.results.set("bound.fitted", fit.fitted);
    ctx.results.set("bound.worst_slack", fit.worst_slack);
    ctx.check("bg.comparison_bound", fit.holds, "v <= omega r^N + C r^(N+2) with C = " + fmt(fit.fitted) + ", worst slack " + fmt(fit.worst_slack));
  }
  ctx.table("bg_profile", mono.table());
}

// ---- mv polynomials ---------------------------------------------------------------

void mv_poly(Context& ctx) {
  const int d = ctx.dim(2);
  Norm norm = Norm::euclidean(d);
  try {
    norm = make_norm(ctx.cfg.text("space.norm", "lp:2"), d);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("key 'space.norm': ") + e.what());
  }
  const long max_m = ctx.cfg.integer("max_degree", 6);
  if (max_m < 1 || max_m > 12) ctx.issue("max_degree", "must lie in [1, 12]");
  const auto expected = ctx.cfg.numbers("expect.dimensions", {});
  if (!expected.empty() && static_cast<long>(expected.size()) != max_m) ctx.issue("expect.dimensions", "need one entry per degree 1..max_degree");
  const double gap_min = ctx.cfg.number("gap_min", 100.0);
  const long vsamples = ctx.count("verify.samples", 20000, 0);
  const auto vradii = ctx.cfg.numbers("verify.radii", {0.1, 0.5, 1.0});
  const long centers = ctx.count("verify.centers", 10);
  const bool negative = ctx.cfg.flag("negative_control", true);
  const long nsamples = ctx.count("negative_control.samples", 200000, 2);
  if (ctx.dry) return;

  CsvTable dims({"m", "dimension", "rank", "gap", "ill_conditioned"});
  CsvTable verify({"m", "basis", "max_deviation", "max_z", "pass"});
  bool dims_ok = true, gaps_ok = true, verify_ok = true;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::string dims_seen;
  std::optional<MvKernel> last;
  for (long m = 1; m <= max_m; ++m) {
    const MvKernel k = mv_kernel(norm, static_cast<int>(m));
    dims.add_row(std::vector<std::string>{std::to_string(m), std::to_string(k.dimension), std::to_string(k.rank), fmt(k.gap),
                                          k.ill_conditioned ? "true" : "false"});
    dims_seen += (m > 1 ? "," : "") + std::to_string(k.dimension);
    if (!expected.empty() && static_cast<double>(k.dimension) != expected[m - 1]) dims_ok = false;
    if (k.rank > 0) {
      worst_gap = std::min(worst_gap, k.gap);
      gaps_ok = gaps_ok && k.gap >= gap_min;
    }
    if (vsamples > 0) {
      for (Eigen::Index j = 0; j < k.vectors.cols(); ++j) {
        const auto c = verify_mvp(k.basis, k.vectors.col(j), norm, vradii, static_cast<std::size_t>(vsamples),
                                  ctx.seed({50, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j)}), static_cast<int>(centers));
        verify.add_row(std::vector<std::string>{std::to_string(m), std::to_string(j), fmt(c.max_deviation), fmt(c.max_z), c.pass ? "true" : "false"});
        verify_ok = verify_ok && c.pass;
      }
    }
    last = k;
  }
  ctx.results.set("dimensions", dims_seen);
  ctx.results.set("min_gap", worst_gap);
  if (!expected.empty()) ctx.check("mv_poly.dimensions", dims_ok, "dimensions " + dims_seen + ", expected " + join(expected));
  ctx.check("mv_poly.gap", gaps_ok, "smallest singular-value gap " + fmt(worst_gap) + " >= " + fmt(gap_min));
  if (vsamples > 0) ctx.check("mv_poly.basis_oracle", verify_ok, "every kernel element within 4 standard errors");
  if (negative && last && last->vectors.cols() > 0) {
    // perturb a kernel element by 0.01 |x|^2, which is not mean-value harmonic
    Eigen::VectorXd c = last->vectors.col(0);
    for (int i = 0; i < d; ++i) {
      MultiIndex a(d, 0);
      a[i] = 2;
      if (max_m >= 2) c[static_cast<Eigen::Index>(last->basis.index(a))] += 0.01;
    }
    const auto bad = verify_mvp(last->basis, c, norm, vradii, static_cast<std::size_t>(nsamples), ctx.seed({51}), static_cast<int>(centers));
    ctx.results.set("negative_control.max_z", bad.max_z);
    ctx.check("mv_poly.negative_control_rejected", !bad.pass, "corrupted element max z = " + fmt(bad.max_z));
  }
  ctx.table("dimensions", std::move(dims));
  if (last) ctx.table("basis", last->basis_table());
  if (vsamples > 0) ctx.table("verify", std::move(verify));
}

// ---- amv norm ---------------------------------------------------------------------

void amv_norm(Context& ctx) {
  const WeightedEuclidean space = ctx.space();
  const ScalarField u = ctx.field("u");
  const double p = ctx.cfg.number("p", 2.0);
  if (!(p >= 1.0)) ctx.issue("p", "must be at least 1");
  const Box mid = [&] {
    std::vector<double> lo, hi;
    for (int i = 0; i < space.dim(); ++i) {
      lo.push_back(space.box().lo[i] + 0.25 * space.box().width(i));
      hi.push_back(space.box().hi[i] - 0.25 * space.box().width(i));
    }
    return Box(lo, hi);
  }();
  std::string fallback;
  for (int i = 0; i < space.dim(); ++i) fallback += (i ? "," : "") + fmt(mid.lo[i]) + "," + fmt(mid.hi[i]);
  const Box region = ctx.box("region", space.dim(), fallback);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < space.dim(); ++i) {
    gap = std::min({gap, (region.lo[i] - space.box().lo[i]) / space.norm().axis_extent(i), (space.box().hi[i] - region.hi[i]) / space.norm().axis_extent(i)});
  }
  const RadiiSchedule sched = ctx.schedule(0.5 * std::max(gap, 1e-12), 0.7, 8);
  if (sched.r0() > gap) ctx.issue("schedule.r0", "clearance: radius " + fmt(sched.r0()) + " exceeds the distance " + fmt(gap) + " from the region to the boundary");
  const long panels = ctx.count("panels", 6);
  const bool has_max = ctx.cfg.has("expect.limsup_max");
  const double lim_max = ctx.cfg.number("expect.limsup_max", 0.0);
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const auto prof = amv_norm_profile(space, quad, u, p, region, sched, static_cast<int>(panels));
  ctx.results.set("limsup", prof.limsup);
  if (has_max) ctx.check("amv_norm.limsup", prof.limsup <= lim_max, "limsup " + within(prof.limsup, lim_max));
  ctx.table("amv_norm", rows_table(prof.rows));
}

// ---- maximal functions and refined averages -----------------------------------------

void maximal(Context& ctx) {
  const WeightedEuclidean space = ctx.space("-1,1");
  const ScalarField u = ctx.field("u");
  const Point x = ctx.point("point", space.dim(), space.box().center());
  const double big_r = ctx.cfg.number("big_r", 0.5 * space.clearance(x));
  if (!(big_r > 0.0)) ctx.issue("big_r", "must be positive");
  ctx.require_clearance(space, x, big_r, "big_r");
  const long levels = ctx.count("levels", 12);
  const bool has_g = ctx.cfg.has("g");
  const ScalarField g = has_g ? ctx.field("g") : ScalarField();
  const bool has_sharp = ctx.cfg.has("expect.sharp");
  const double sharp_expect = ctx.cfg.number("expect.sharp", 0.0);
  const double sharp_tol = ctx.cfg.number("expect.sharp_tolerance", 1e-3);
  const double rr = ctx.cfg.number("refined.radius", 0.0);
  const double refined_tol = ctx.cfg.number("refined.tolerance", 1e-6);
  if (rr > 0.0) ctx.require_clearance(space, x, rr, "refined.radius");
  const auto hradii = ctx.cfg.numbers("hajlasz.radii", {});
  Box hregion;
  long hpairs = 0;
  double spread_max = 2.0;
  if (!hradii.empty()) {
    hregion = ctx.box("hajlasz.region", space.dim(), "-0.2,0.2");
    hpairs = ctx.count("hajlasz.pairs", 24);
    spread_max = ctx.cfg.number("hajlasz.spread_max", 2.0);
    const double rmax = *std::max_element(hradii.begin(), hradii.end());
    for (int i = 0; i < space.dim(); ++i) {
      // pairs sit within r of the middle along the first axis; c = A_{3r} u(x) reaches 3r further
      const double mid = 0.5 * (hregion.lo[i] + hregion.hi[i]);
      const double lo = i == 0 ? std::max(hregion.lo[i], mid - rmax) : hregion.lo[i];
      const double hi = i == 0 ? std::min(hregion.hi[i], mid + rmax) : hregion.hi[i];
      const double reach = 3.0 * rmax * space.norm().axis_extent(i);
      if (lo - reach < space.box().lo[i] || hi + reach > space.box().hi[i]) {
        ctx.issue("hajlasz.region", "clearance: sampled pairs grown by 3 r_max leave the domain");
        break;
      }
    }
  }
  const BallQuadrature quad = ctx.quadrature(space.norm());
  if (ctx.dry) return;

  const double sharp = sharp_maximal(space, quad, u, big_r, x, static_cast<int>(levels));
  ctx.results.set("sharp_maximal", sharp);
  if (has_sharp) {
    const double dev = std::abs(sharp - sharp_expect);
    ctx.check("maximal.sharp", dev <= sharp_tol, "|M# u - expected| = " + within(dev, sharp_tol));
  }
  if (has_g) ctx.results.set("restricted_maximal", restricted_maximal(space, quad, g, big_r, x, static_cast<int>(levels)));
  if (rr > 0.0) {
    const double a = refined_average(space, quad, u, rr, x);
    const double dev = std::abs(a - u(x));
    ctx.results.set("refined.value", a);
    ctx.results.set("refined.deviation", dev);
    ctx.check("maximal.refined_invariance", dev <= refined_tol, "|A^r u - u| = " + within(dev, refined_tol));
  }
  if (!hradii.empty()) {
    const auto sweep = hajlasz_constant(space, quad, u, hradii, hregion, static_cast<int>(hpairs), ctx.seed({60}));
    ctx.results.set("hajlasz.spread", sweep.spread);
    for (std::size_t i = 0; i < sweep.radii.size(); ++i) ctx.results.set("hajlasz.constant." + std::to_string(i + 1), sweep.constants[i]);
    ctx.check("maximal.hajlasz_stable", sweep.spread <= spread_max, "max/min constant " + within(sweep.spread, spread_max));
    ctx.table("hajlasz", sweep.table());
  }
}

}  // namespace

KindFn kind_function(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::identities: return identities;
    case ExperimentKind::moments: return moments;
    case ExperimentKind::convergence: return convergence;
    case ExperimentKind::heisenberg_bpz: return heisenberg_bpz;
    case ExperimentKind::dirichlet: return dirichlet;
    case ExperimentKind::weak_amv: return weak_amv;
    case ExperimentKind::amv_vs_cheeger: return amv_vs_cheeger;
    case ExperimentKind::mm_boundary: return mm_boundary;
    case ExperimentKind::bg_profile: return bg_profile;
    case ExperimentKind::mv_poly: return mv_poly;
    case ExperimentKind::amv_norm: return amv_norm;
    case ExperimentKind::maximal: return maximal;
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace amv::cli
