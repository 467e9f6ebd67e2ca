#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "amv/weighted/elliptic.hpp"
#include "amv/weighted/experiments.hpp"
#include "amv/weighted/moments.hpp"
#include "doctest.h"

using namespace amv;

namespace {

const BallQuadrature& polar(std::size_t count = 4096) {
  static const BallQuadrature q(Norm::euclidean(2), count, SamplingMode::tensor_grid, 0);
  return q;
}

double max_error(const GridFunction& u, const ScalarField& exact) {
  double e = 0.0;
  for (std::size_t k = 0; k < u.grid().size(); ++k) e = std::max(e, std::abs(u[k] - exact(u.grid().point(k))));
  return e;
}

double manufactured_error(const ScalarField& ustar, const WeightField& w, int cells) {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), cells);
  const Eigen::MatrixXd m = second_moment_tensor(Norm::euclidean(2), 2).matrix();
  const WeightField* wp = &w;
  const auto rhs = ScalarField::from_callable([&, wp](PointView x) { return apply_Lw(ustar, *wp, m, x); }, "Lw u*", 2);
  const auto sys = assemble_dirichlet(g, w, m, rhs, ustar);
  return max_error(solve_dirichlet(sys).solution, ustar);
}

}  // namespace

TEST_CASE("moments: euclidean closed form against a radial oracle") {
  for (const int n : {2, 3, 4}) {
    // avg |y|^2 = int_0^1 rho^{n+1} / int_0^1 rho^{n-1} = n/(n+2), split evenly over the axes
    const double oracle = (static_cast<double>(n) / (n + 2)) / n;
    const auto mt = second_moment_tensor(Norm::euclidean(n), 4);
    const Eigen::MatrixXd m = mt.matrix();
    CHECK(mt.method() == "analytic");
    CHECK((m - Eigen::MatrixXd::Identity(n, n) * oracle).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    for (const auto& a : graded_multi_indices(n, 4)) {
      if (total_degree(a) % 2 == 1) CHECK(mt(a) == 0.0);
    }
  }
  // avg y1^4 over the disc: int r^5 cos^4 / (pi/2) = (1/6)(3pi/4)/(pi/2) = 1/8
  CHECK(lp_ball_moment(2, 2.0, {4, 0}) == doctest::Approx(0.125).epsilon(1e-13).scale(0));
  CHECK(lp_ball_moment(2, 2.0, {2, 2}) == doctest::Approx(1.0 / 24.0).epsilon(1e-13).scale(0));
}

TEST_CASE("moments: sup norm and general p against 1-d quadrature") {
  const Eigen::MatrixXd m = second_moment_tensor(Norm::sup(2), 2).matrix();
  CHECK((m - Eigen::Matrix2d::Identity() / 3.0).cwiseAbs().maxCoeff() <= 1e-14);
  using boost::math::quadrature::gauss_kronrod;
  for (const double p : {1.0, 1.5, 3.0, 4.0}) {
    // slice width 2(1-|y|^p)^{1/p}
    const auto width = [p](double y) { return 2.0 * std::pow(1.0 - std::pow(std::abs(y), p), 1.0 / p); };
    const double area = gauss_kronrod<double, 61>::integrate(width, -1.0, 1.0, 15, 1e-14);
    const double m11 = gauss_kronrod<double, 61>::integrate([&](double y) { return y * y * width(y); }, -1.0, 1.0, 15, 1e-14) / area;
    const double m22 = gauss_kronrod<double, 61>::integrate(
                           [&](double y) {
                             const double s = width(y) / 2.0;
                             return 2.0 * s * s * s / 3.0;
                           },
                           -1.0, 1.0, 15, 1e-14) /
                       area;
    const auto mt = second_moment_tensor(Norm::lp(2, p), 2);
    CHECK(mt({2, 0}) == doctest::Approx(m11).epsilon(1e-9).scale(0));
    CHECK(mt({0, 2}) == doctest::Approx(m22).epsilon(1e-9).scale(0));
    CHECK(mt({1, 1}) == 0.0);
  }
}

TEST_CASE("moments: monte carlo path") {
  MomentOptions opt;
  opt.method = MomentMethod::monte_carlo;
  opt.samples = 200000;
  for (const int n : {2, 3}) {
    const auto mt = second_moment_tensor(Norm::euclidean(n), 2, opt);
    CHECK(mt.method() == "monte_carlo");
    const Eigen::MatrixXd m = mt.matrix();
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() > 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        MultiIndex a(n, 0);
        ++a[i];
        ++a[j];
        const double exact = i == j ? 1.0 / (n + 2) : 0.0;
        CHECK(std::abs(m(i, j) - exact) <= 3.0 * mt.std_error(a) + 1e-15);
      }
    }
  }
  Eigen::Matrix2d a;
  a << 2.0, 0.5, 0.5, 1.0;
  const auto analytic = second_moment_tensor(Norm::quadratic(a), 2);
  CHECK((analytic.matrix() - a.inverse() / 4.0).cwiseAbs().maxCoeff() <= 1e-14);
  const auto mc = second_moment_tensor(Norm::quadratic(a), 2, opt);
  CHECK(std::abs(mc({1, 1}) - analytic({1, 1})) <= 4.0 * mc.std_error({1, 1}));
  opt.samples = 100;
  opt.tolerance = 1e-6;
  CHECK_THROWS_AS(second_moment_tensor(Norm::lp(2, 3.0), 2, opt), NumericalError);
  CHECK_THROWS_AS(second_moment_tensor(Norm::euclidean(2), 1), ConfigError);
}

TEST_CASE("apply_Lw examples") {
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() / 4.0;
  const double x[2] = {0.3, 0.6};
  CHECK(apply_Lw(ScalarField::squared_norm(), WeightField(), m, x) == doctest::Approx(0.5).epsilon(1e-15).scale(0));
  CHECK(apply_Lw(ScalarField::affine(1.0, {2.0, -1.0}), WeightField(), m, x) == 0.0);
  // w = e^{-f}: L_w u = (1/(n+2)) (Delta u / 2 - <grad f, grad u>)
  const ScalarField f = ScalarField::quadratic_positive(0.0, {0.5, 1.0});
  const ScalarField u = ScalarField::harmonic(3, false) + ScalarField::squared_norm();
  const WeightField w(f.exp_of(-1.0));
  const double lap = u.hessian(x).trace();
  const double expected = (0.5 * lap - f.gradient(x).dot(u.gradient(x))) / 4.0;
  CHECK(apply_Lw(u, w, m, x) == doctest::Approx(expected).epsilon(1e-13).scale(0));
}

TEST_CASE("convergence: extrapolated weighted r-laplacian matches L_w") {
  const WeightedEuclidean flat(Box::cube(2, 0, 1), Norm::euclidean(2));
  const std::vector<Point> pts = {{0.5, 0.5}, {0.3, 0.4}, {0.7, 0.6}};
  const RadiiSchedule sched = RadiiSchedule::from_clearance(0.3, 0.7, 8);
  ConvergenceOptions opt;
  opt.lp_region = Box::cube(2, 0.4, 0.6);
  opt.lp_cells = 2;
  auto rep = convergence_check(flat, polar(), ScalarField::squared_norm(), pts, sched, 2.0, opt);
  CHECK(rep.pass);
  for (const auto& pc : rep.points) CHECK(pc.limit.value == doctest::Approx(0.5).epsilon(1e-8).scale(0));
  CHECK(rep.lp_relative_deviation <= 1e-8);

  // affine u: the limit is the pure drift <grad w / w, M grad u>
  const WeightedEuclidean tilted(Box::cube(2, 0, 1), Norm::euclidean(2), make_weight("exp_linear:1,-0.5"));
  rep = convergence_check(tilted, polar(), ScalarField::linear({1.0, 2.0}), pts, sched, 2.0);
  for (const auto& pc : rep.points) {
    CHECK(pc.reference == doctest::Approx((1.0 - 1.0) / 4.0).epsilon(1e-14));
  }
  CHECK(rep.pass);
  rep = convergence_check(tilted, polar(), ScalarField::linear({1.0, 0.0}), pts, sched, 2.0);
  for (const auto& pc : rep.points) {
    CHECK(pc.reference == doctest::Approx(0.25).epsilon(1e-14).scale(0));
    CHECK(pc.limit.value == doctest::Approx(0.25).epsilon(1e-4).scale(0));
  }
  const WeightedEuclidean gw(Box::cube(2, 0, 1), Norm::euclidean(2), make_weight("gauss:1"));
  rep = convergence_check(gw, polar(), make_field("exp_cos"), pts, sched, 2.0);
  CHECK(rep.pass);
  CHECK_THROWS_AS(convergence_check(flat, polar(), ScalarField::squared_norm(), {{0.05, 0.5}}, sched, 2.0), DomainError);
}

TEST_CASE("assembly: exactness, stencil and maximum principle") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 16);
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() / 4.0;
  const ScalarField aff = ScalarField::affine(0.5, {1.0, -2.0});
  auto sys = assemble_dirichlet(g, WeightField(), m, ScalarField::constant(0.0), aff);
  CHECK(max_error(solve_dirichlet(sys).solution, aff) <= 1e-10);
  for (Eigen::Index i = 0; i < sys.matrix.rows(); ++i) CHECK(sys.matrix.row(i).nonZeros() <= 9);
  CHECK(sys.dominant_rows == sys.interior_rows);

  sys = assemble_dirichlet(g, make_weight("exp_linear:1,1"), m, ScalarField::constant(0.0), ScalarField::constant(3.0));
  const auto c = solve_dirichlet(sys);
  CHECK(c.relative_residual <= 1e-10);
  CHECK((c.solution.values().array() - 3.0).abs().maxCoeff() <= 1e-10);

  // anisotropic M with cross terms: quadratic forms are reproduced exactly
  Eigen::Matrix2d a;
  a << 2.0, 0.7, 0.7, 1.0;
  const Eigen::Matrix2d ma = a.inverse() / 4.0;
  const ScalarField q = ScalarField::polynomial({{2, 0}, {1, 1}, {0, 2}}, {1.0, 3.0, -2.0});
  const auto rhs = ScalarField::from_callable([&](PointView x) { return apply_Lw(q, WeightField(), ma, x); }, "rhs", 2);
  CHECK(max_error(solve_dirichlet(assemble_dirichlet(g, WeightField(), ma, rhs, q)).solution, q) <= 1e-10);

  // harmonic boundary data: extrema on the boundary
  const ScalarField h = make_field("exp_cos");
  const auto sol = solve_dirichlet(assemble_dirichlet(g, make_weight("gauss:0.5"), m, ScalarField::constant(0.0), h)).solution;
  double bmin = 1e300, bmax = -1e300, imin = 1e300, imax = -1e300;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto& lo = g.is_boundary(k) ? bmin : imin;
    auto& hi = g.is_boundary(k) ? bmax : imax;
    lo = std::min(lo, sol[k]);
    hi = std::max(hi, sol[k]);
  }
  CHECK(imin >= bmin);
  CHECK(imax <= bmax);
}

TEST_CASE("assembly: peclet warning and upwinding") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 8);
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() / 4.0;
  const WeightField steep = make_weight("exp_linear:20,0");
  const auto central = assemble_dirichlet(g, steep, m, ScalarField::constant(0.0), ScalarField::coordinate(0, 2), Upwinding::never);
  CHECK(central.max_peclet > 2.0);
  CHECK(central.upwinded_nodes == 0);
  CHECK(central.warnings.size() == 1);
  CHECK(central.dominant_rows < central.interior_rows);
  const auto up = assemble_dirichlet(g, steep, m, ScalarField::constant(0.0), ScalarField::coordinate(0, 2));
  CHECK(up.upwinded_nodes == up.interior_rows);
  CHECK(up.dominant_rows == up.interior_rows);
  const auto mild = assemble_dirichlet(g, make_weight("exp_linear:0.5,0"), m, ScalarField::constant(0.0), ScalarField::coordinate(0, 2));
  CHECK(mild.warnings.empty());
  CHECK(mild.upwinded_nodes == 0);
  CHECK_THROWS_AS(assemble_dirichlet(Grid::uniform(Box::cube(2, 0, 1), 1), WeightField(), m, ScalarField::constant(0.0), ScalarField::constant(0.0)),
                  ConfigError);
}

TEST_CASE("solver: bicgstab agrees with LU and reports failure") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 24);
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() / 4.0;
  const auto sys = assemble_dirichlet(g, make_weight("exp_linear:1,0.5"), m, ScalarField::constant(1.0), make_field("exp_cos"));
  const auto lu = solve_dirichlet(sys);
  CHECK(lu.method == "sparse_lu");
  SolveOptions it;
  it.solver = SolverKind::bicgstab;
  const auto kr = solve_dirichlet(sys, it);
  CHECK(kr.method == "bicgstab_jacobi");
  CHECK(kr.relative_residual <= 1e-10);
  CHECK(kr.iterations > 0);
  CHECK((kr.solution.values() - lu.solution.values()).cwiseAbs().maxCoeff() <= 1e-8);
  it.max_iter = 2;
  CHECK_THROWS_AS(solve_dirichlet(sys, it), NumericalError);
}

TEST_CASE("solver: harmonic polynomial and manufactured order") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 20);
  const ScalarField re2 = ScalarField::harmonic(2, false);
  const auto sol = solve_dirichlet(assemble_dirichlet(g, WeightField(), Eigen::Matrix2d::Identity() / 4.0, ScalarField::constant(0.0), re2));
  CHECK(max_error(sol.solution, re2) <= 1e-10);

  const std::vector<std::pair<const char*, const char*>> pairs = {
      {"exp_cos", "exp_linear:1,-0.5"}, {"harmonic_re:3+sqnorm", "gauss:0.7"}, {"exp_linear:1,1", "quadpos:1,1,2"}};
  for (const auto& [u, w] : pairs) {
    const double e1 = manufactured_error(make_field(u), make_weight(w), 16);
    const double e2 = manufactured_error(make_field(u), make_weight(w), 32);
    const double order = std::log2(e1 / e2);
    INFO(u << " / " << w << " ratio " << e1 / e2);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
  }
}

TEST_CASE("cheeger solve: one-dimensional closed form") {
  const double a = 2.0;
  const ScalarField exact = ScalarField::from_callable([a](PointView x) { return std::expm1(a * x[0]) / std::expm1(a); }, "closed form", 1);
  std::vector<double> errs;
  for (const int cells : {16, 32, 64}) {
    const Grid g = Grid::uniform(Box::cube(1, 0, 1), cells);
    // u'' = a u', f = a x
    const auto sol = cheeger_drift_solve(g, ScalarField::linear({a}), ScalarField::coordinate(0, 1));
    errs.push_back(max_error(sol.solution, exact));
  }
  CHECK(errs[0] <= 1e-3);
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1).scale(0));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.1).scale(0));

  // f constant: plain Laplace
  const Grid g2 = Grid::uniform(Box::cube(2, 0, 1), 12);
  const ScalarField re2 = ScalarField::harmonic(2, false);
  CHECK(max_error(cheeger_drift_solve(g2, ScalarField::constant(4.0), re2).solution, re2) <= 1e-10);
}

TEST_CASE("weak amv pairing") {
  const WeightedEuclidean flat(Box::cube(2, 0, 1), Norm::euclidean(2));
  const ScalarField phi = ScalarField::bump(0.25, {0.5, 0.5});
  const RadiiSchedule sched(0.1, 0.7, 6);
  const auto zero = weak_amv_test(flat, polar(), ScalarField::squared_norm(), phi.scaled(0.0), sched, 6);
  for (const auto& row : zero.rows) CHECK(row.value == 0.0);

  const auto prof = weak_amv_test(flat, polar(), ScalarField::squared_norm(), phi, sched, 6);
  const double mass = bump_integral(0.25, 2);
  // the box rule does not follow the circular edge of the support
  CHECK(prof.phi_mass == doctest::Approx(mass).epsilon(1e-5).scale(0));
  CHECK(prof.limit.value == doctest::Approx(0.5 * mass).epsilon(0.02).scale(0));

  // the same through a grid interpolant
  const GridFunction ug = GridFunction::sample(Grid::uniform(Box::cube(2, 0, 1), 64), ScalarField::squared_norm());
  const auto gp = weak_amv_test(flat, polar(), ug.as_field(), phi, sched, 6);
  CHECK(gp.limit.value == doctest::Approx(0.5 * mass).epsilon(0.02).scale(0));
  CHECK_THROWS_AS(weak_amv_test(flat, polar(), ScalarField::squared_norm(), ScalarField::bump(0.25, {0.3, 0.5}), sched), DomainError);
}

TEST_CASE("amv versus cheeger dichotomy") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 64);
  const ScalarField phi = ScalarField::bump(0.25, {0.5, 0.5});
  const RadiiSchedule sched(0.1, 0.7, 6);
  // boundary data of the 1-D solution u = expm1(x1)/expm1(1) of u'' = u'
  const double c = 1.0 / std::expm1(1.0);
  const ScalarField exact = ScalarField::exp_linear({1.0, 0.0}).scaled(c) - ScalarField::constant(c);
  const auto rep = amv_vs_cheeger_report(g, ScalarField::coordinate(0, 2), phi, exact, polar(), sched);
  const double scale = rep.lw_profile.scale;
  INFO(rep.record().str());
  CHECK(std::abs(rep.lw_profile.rows.back().value) <= 1e-2 * scale);
  CHECK(std::abs(rep.cheeger_profile.limit.value - rep.target) <= 0.05 * std::abs(rep.target));
  CHECK(std::abs(rep.target) > 10.0 * 1e-2 * scale);
  // monotone u: the sign of the target is that of -int phi d1u e^{-x1}
  CHECK(rep.target < 0.0);
  // closed form: u = expm1(x)/expm1(1), L_w u = -u'/8, dmu = e^{-x} dx
  const double closed = -bump_integral(0.25, 2) / (8.0 * std::expm1(1.0));
  CHECK(std::abs(rep.target - closed) <= 1e-3 * std::abs(closed));
  CHECK(std::abs(rep.cheeger_profile.limit.value - closed) <= 0.05 * std::abs(closed));

  const auto flat = amv_vs_cheeger_report(Grid::uniform(Box::cube(2, 0, 1), 32), ScalarField::constant(0.0), phi, ScalarField::coordinate(0, 2),
                                          polar(), sched);
  CHECK(std::abs(flat.lw_profile.limit.value) <= 1e-3 * flat.lw_profile.scale);
  CHECK(std::abs(flat.cheeger_profile.limit.value) <= 1e-3 * flat.cheeger_profile.scale);
}

TEST_CASE("equivalence: solution versus perturbed non-solution") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 64);
  const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() / 4.0;
  const Box sub = Box::cube(2, 0.35, 0.65);
  for (const char* wd : {"exp_linear:1,-0.5", "gauss:0.7", "quadpos:1,1,2"}) {
    const WeightField w = make_weight(wd);
    const WeightedEuclidean space(Box::cube(2, 0, 1), Norm::euclidean(2), w);
    const auto sol = solve_dirichlet(assemble_dirichlet(g, w, m, ScalarField::constant(0.0), make_field("exp_cos"))).solution;
    const ScalarField u = sol.as_field();
    const ScalarField pert = u + ScalarField::squared_norm().scaled(0.1);
    const double scale = sol.max_abs();
    const auto a = amv_grid_norms(space, polar(), u, sub, 4, 0.05);
    const auto b = amv_grid_norms(space, polar(), pert, sub, 4, 0.05);
    INFO(wd << " solution " << a.l2 << " perturbed " << b.l2);
    CHECK(a.l2 <= 1e-2 * scale);
    CHECK(b.l2 >= 10.0 * a.l2);
    CHECK(a.sup >= a.l2);
  }
}
