#include <cmath>
#include <numbers>
#include <set>

#include "amv/core/ball_quadrature.hpp"
#include "amv/core/box_quadrature.hpp"
#include "amv/core/field.hpp"
#include "amv/core/finite_space.hpp"
#include "amv/core/grid.hpp"
#include "amv/core/norm.hpp"
#include "amv/core/weighted_euclidean.hpp"
#include "doctest.h"

using namespace amv;

namespace {

// average of y1^2 over the unit disc by a 1-D midpoint rule in y1
double disc_y1_squared_oracle() {
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + (i + 0.5) * 2.0 / n;
    s += x * x * 2.0 * std::sqrt(1.0 - x * x) * 2.0 / n;
  }
  return s / std::numbers::pi;
}

}  // namespace

TEST_CASE("norm examples") {
  CHECK(make_norm("lp:2", 3)(Point{1, 2, 2}) == doctest::Approx(3.0).epsilon(1e-15).scale(0));
  CHECK(make_norm("lp:inf", 2)(Point{0.3, -0.7}) == 0.7);
  CHECK(make_norm("quad:4,0,0,1", 2)(Point{1, 0}) == doctest::Approx(2.0).epsilon(1e-15).scale(0));
  CHECK(make_norm("euclidean", 2).is_euclidean());
  CHECK(make_norm("sup", 3).is_sup());
}

TEST_CASE("norm errors") {
  CHECK_THROWS_AS(make_norm("lp:0.5", 2), ConfigError);
  CHECK_THROWS_AS(make_norm("quad:1,2,2,1", 2), ConfigError);
  CHECK_THROWS_AS(make_norm("quad:1,0.5,0,1", 2), ConfigError);
  CHECK_THROWS_AS(make_norm("taxicab", 2), ConfigError);
  CHECK_THROWS_AS(make_norm("quad:1,0,0", 2), ConfigError);
}

TEST_CASE("norm axioms on random triples") {
  for (const char* d : {"lp:1", "lp:1.5", "lp:2", "lp:4", "lp:inf", "quad:2,0.5,0.5,1"}) {
    const Norm nm = make_norm(d, 2);
    Rng rng(17);
    for (int k = 0; k < 10000; ++k) {
      Point a(2), b(2), s(2);
      for (int i = 0; i < 2; ++i) {
        a[i] = rng.uniform(-3, 3);
        b[i] = rng.uniform(-3, 3);
        s[i] = a[i] + b[i];
      }
      const double lhs = nm(s), rhs = nm(a) + nm(b);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
      const double t = rng.uniform(0, 5);
      Point ta{t * a[0], t * a[1]}, ma{-a[0], -a[1]};
      CHECK(nm(ta) == doctest::Approx(t * nm(a)).epsilon(1e-13).scale(0));
      CHECK(nm(ma) == nm(a));
    }
    CHECK(nm(Point{0, 0}) == 0.0);
    CHECK(nm(Point{1e-300, 0}) > 0.0);
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(Norm::euclidean(2).unit_ball_volume() == doctest::Approx(std::numbers::pi).epsilon(1e-14).scale(0));
  CHECK(Norm::euclidean(3).unit_ball_volume() == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14).scale(0));
  CHECK(Norm::sup(2).unit_ball_volume() == doctest::Approx(4.0).epsilon(1e-14).scale(0));
  CHECK(Norm::lp(2, 1.0).unit_ball_volume() == doctest::Approx(2.0).epsilon(1e-14).scale(0));
  CHECK(make_norm("quad:4,0,0,1", 2).unit_ball_volume() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14).scale(0));
  CHECK(omega(4) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0).epsilon(1e-14).scale(0));
}

TEST_CASE("ball quadrature: Monte-Carlo moments") {
  const BallQuadrature q(Norm::euclidean(2), 1000000, SamplingMode::monte_carlo, 3);
  CHECK(q.second_moment()(0, 0) == doctest::Approx(disc_y1_squared_oracle()).epsilon(3e-3 / 0.25).scale(0));
  CHECK(std::abs(disc_y1_squared_oracle() - 0.25) < 1e-8);
  const BallQuadrature s(Norm::sup(2), 1000000, SamplingMode::monte_carlo, 4);
  CHECK(std::abs(s.second_moment()(0, 1)) < 3e-3);
  CHECK(s.acceptance_rate() == 1.0);
  CHECK(q.acceptance_rate() == doctest::Approx(std::numbers::pi / 4.0).epsilon(5e-3).scale(0));
  CHECK(q.volume_estimate() == doctest::Approx(std::numbers::pi).epsilon(5e-3).scale(0));
}

TEST_CASE("ball quadrature: antithetic and tensor rules are exactly centred") {
  for (const char* d : {"lp:2", "lp:4", "lp:inf", "lp:1", "quad:2,0.5,0.5,1"}) {
    for (const auto mode : {SamplingMode::antithetic, SamplingMode::tensor_grid}) {
      const BallQuadrature q(make_norm(d, 2), 2000, mode, 11);
      CHECK(q.first_moment().cwiseAbs().maxCoeff() == 0.0);
      CompensatedSum s;
      for (const double w : q.weights()) s.add(w);
      CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15).scale(0));
      for (std::size_t i = 0; i < q.size(); ++i) CHECK(q.norm()(q.node(i)) < 1.0);
    }
  }
  const BallQuadrature q3(Norm::euclidean(3), 4000, SamplingMode::tensor_grid, 1);
  CHECK(q3.first_moment().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(BallQuadrature(Norm::euclidean(2), 11, SamplingMode::antithetic, 1), ConfigError);
  CHECK_THROWS_AS(BallQuadrature(Norm::euclidean(2), 1, SamplingMode::monte_carlo, 1), ConfigError);
}

TEST_CASE("ball quadrature: polar rule integrates polynomials exactly on the disc") {
  const BallQuadrature q(Norm::euclidean(2), 4096, SamplingMode::tensor_grid, 0);
  const Eigen::MatrixXd m = q.second_moment();
  CHECK(m(0, 0) == doctest::Approx(0.25).epsilon(1e-13).scale(0));
  CHECK(m(1, 1) == doctest::Approx(0.25).epsilon(1e-13).scale(0));
  CHECK(std::abs(m(0, 1)) < 1e-15);
  CHECK(q.volume_estimate() == doctest::Approx(std::numbers::pi).epsilon(1e-13).scale(0));
}

TEST_CASE("ball quadrature: rejection floor") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 1e8;
  CHECK_THROWS_AS(BallQuadrature(Norm::quadratic(a), 1000, SamplingMode::monte_carlo, 1), NumericalError);
}

TEST_CASE("ball quadrature: determinism") {
  const BallQuadrature a(Norm::lp(2, 4), 1000, SamplingMode::antithetic, 99);
  const BallQuadrature b(Norm::lp(2, 4), 1000, SamplingMode::antithetic, 99);
  const BallQuadrature c(Norm::lp(2, 4), 1000, SamplingMode::antithetic, 100);
  CHECK(a.node(17)[0] == b.node(17)[0]);
  CHECK(a.node(17)[0] != c.node(17)[0]);
}

TEST_CASE("ball members") {
  const FiniteSpace two({Point{0.0}, Point{1.0}}, {1.0, 1.0}, Norm::euclidean(1));
  CHECK(two.ball_members(0, 1.0).indices == std::vector<std::size_t>{0});
  const auto all = two.ball_members(0, 5.0);
  CHECK(all.indices.size() == 2);
  CHECK(all.mass == two.total_mass());
  const FiniteSpace lat = FiniteSpace::lattice_1d(10, 1.0);
  CHECK(lat.ball_members(4, 0.5).indices == std::vector<std::size_t>{4});
  CHECK(lat.ball_members(4, 0.5).mass == 1.0);

  const FiniteSpace sp = FiniteSpace::random(50, 3, 5);
  for (std::size_t i = 0; i < sp.size(); i += 7) {
    double prev = 0.0;
    std::set<std::size_t> prev_set;
    for (double r = 0.05; r < 2.0; r *= 1.3) {
      const auto b = sp.ball_members(i, r);
      const std::set<std::size_t> cur(b.indices.begin(), b.indices.end());
      CHECK(cur.count(i) == 1);
      CHECK(std::includes(cur.begin(), cur.end(), prev_set.begin(), prev_set.end()));
      CHECK(b.mass >= prev);
      prev = b.mass;
      prev_set = cur;
    }
  }
  CHECK_THROWS_AS(sp.ball_members(0, 0.0), ConfigError);
}

TEST_CASE("finite space validation") {
  CHECK_THROWS_AS(FiniteSpace({Point{0.0}, Point{1.0}}, {1.0, 0.0}, Norm::euclidean(1)), ConfigError);
  Eigen::MatrixXd d(2, 2);
  d << 0, 1, 2, 0;
  CHECK_THROWS_AS(FiniteSpace({1.0, 1.0}, d), ConfigError);
  d << 0.5, 1, 1, 0;
  CHECK_THROWS_AS(FiniteSpace({1.0, 1.0}, d), ConfigError);
  d << 0, 1, 1, 0;
  CHECK_NOTHROW(FiniteSpace({1.0, 1.0}, d));
}

TEST_CASE("field catalog derivatives match central differences") {
  const std::vector<std::string> catalog = {"const:2",        "linear:1,-2",   "affine:0.5,1,2",  "coord:1",         "sqnorm",
                                            "harmonic_re:3",  "harmonic_im:4", "monomial:2,1",    "exp_linear:0.7,-0.3", "gauss:0.5",
                                            "exp_cos",        "quadpos:1,0.5,2", "bump:0.8,0.1,0.2", "2@sqnorm*exp_linear:1,0",
                                            "harmonic_re:2 + -1@gauss:1", "exp_linear:1,0*quadpos:2,1,1"};
  const double h = 1e-4;
  for (const auto& d : catalog) {
    const ScalarField f = make_field(d);
    for (const Point x : {Point{0.3, -0.2}, Point{-0.4, 0.5}, Point{0.15, 0.25}}) {
      const Eigen::VectorXd g = f.gradient(x);
      const Eigen::MatrixXd hs = f.hessian(x);
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      const double hscale = std::max(1.0, hs.cwiseAbs().maxCoeff());
      for (int a = 0; a < 2; ++a) {
        Point xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const double fd = (f(xp) - f(xm)) / (2 * h);
        CHECK_MESSAGE(std::abs(fd - g[a]) <= 1e-6 * scale, d);
        const Eigen::VectorXd gd = (f.gradient(xp) - f.gradient(xm)) / (2 * h);
        for (int b = 0; b < 2; ++b) CHECK_MESSAGE(std::abs(gd[b] - hs(a, b)) <= 1e-6 * hscale, d);
      }
    }
  }
}

TEST_CASE("field values") {
  CHECK(make_field("harmonic_re:3")(Point{1.0, 2.0}) == doctest::Approx(1.0 - 3.0 * 4.0).scale(0));
  CHECK(make_field("harmonic_im:2")(Point{1.0, 2.0}) == doctest::Approx(4.0).scale(0));
  CHECK(make_field("monomial:2,1,0")(Point{2.0, 3.0, 5.0}) == 12.0);
  CHECK(make_field("bump:0.5,0,0")(Point{0.5, 0.0}) == 0.0);
  CHECK(make_field("bump:0.5,0,0")(Point{0.0, 0.0}) == 1.0);
  CHECK(make_field("step:0,0.5")(Point{0.6, 0.0}) == 1.0);
  CHECK(make_field("3@const:2 + sqnorm")(Point{1.0, 1.0}) == 8.0);
  CHECK(make_field("const:1e+2")(Point{0.0}) == 100.0);
  CHECK_FALSE(make_field("step:0,0.5").has_gradient());
  CHECK_THROWS_AS(make_field("nosuch:1"), ConfigError);
  CHECK_THROWS_AS(make_field(""), ConfigError);
  CHECK_THROWS_AS(make_field("gauss:abc"), ConfigError);
}

TEST_CASE("bump integral") {
  const double rho = 0.3;
  const BoxQuadrature bq(Box::cube(2, -rho, rho), 40, 4);
  const ScalarField phi = ScalarField::bump(rho, {0.0, 0.0});
  double s = 0.0;
  for (std::size_t k = 0; k < bq.size(); ++k) s += bq.weight(k) * phi(bq.node(k));
  // 2 pi rho^2 int_0^1 (1-s^2)^3 s ds = pi rho^2 / 4
  CHECK(bump_integral(rho, 2) == doctest::Approx(std::numbers::pi * rho * rho / 4.0).epsilon(1e-14).scale(0));
  CHECK(s == doctest::Approx(bump_integral(rho, 2)).epsilon(1e-6).scale(0));
}

TEST_CASE("weights") {
  CHECK(make_weight("const:2").is_constant());
  CHECK_FALSE(make_weight("gauss:1").is_constant());
  CHECK_THROWS_AS(make_weight("const:-1"), ConfigError);
  CHECK_THROWS_AS(make_weight("linear:1,0").check_positive_on(Box::cube(2, -1, 1)), ConfigError);
  CHECK_NOTHROW(make_weight("exp_linear:1,0").check_positive_on(Box::cube(2, -1, 1)));
  CHECK_THROWS_AS(WeightedEuclidean(Box::cube(2, 0, 1), Norm::euclidean(2), make_weight("affine:-0.5,1,0")), ConfigError);
}

TEST_CASE("weighted euclidean clearance") {
  const WeightedEuclidean sp(Box::cube(2, 0, 1), Norm::euclidean(2));
  CHECK(sp.clearance(Point{0.3, 0.5}) == doctest::Approx(0.3).scale(0));
  CHECK(sp.hausdorff_ratio() == doctest::Approx(1.0).epsilon(1e-15).scale(0));
  CHECK_THROWS_AS(sp.require_ball(Point{0.3, 0.5}, 0.31), DomainError);
  const WeightedEuclidean sq(Box::cube(2, 0, 1), Norm::sup(2));
  CHECK(sq.hausdorff_ratio() == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-15).scale(0));
  const WeightedEuclidean qq(Box::cube(2, 0, 1), make_norm("quad:4,0,0,1", 2));
  CHECK(qq.clearance(Point{0.5, 0.5}) == doctest::Approx(0.5).scale(0));
  CHECK(qq.clearance(Point{0.2, 0.5}) == doctest::Approx(0.4).scale(0));
}

TEST_CASE("grid") {
  const Grid g = Grid::uniform(Box::cube(2, 0, 1), 4);
  CHECK(g.size() == 25);
  CHECK(g.interior().size() == 9);
  for (const auto k : g.interior()) {
    const auto m = g.multi_index(k);
    for (int a = 0; a < 2; ++a) {
      CHECK(m[a] - 1 >= 0);
      CHECK(m[a] + 1 <= g.cells(a));
    }
  }
  CHECK(g.index(g.multi_index(13)) == 13);
  const ScalarField cubic = make_field("monomial:3,0 + monomial:1,2 + const:1");
  const GridFunction gf = GridFunction::sample(Grid::uniform(Box::cube(2, 0, 1), 8), cubic);
  for (const Point x : {Point{0.01, 0.99}, Point{0.5, 0.33}, Point{0.93, 0.07}}) {
    CHECK(gf.interpolate(x) == doctest::Approx(cubic(x)).epsilon(1e-13).scale(0));
  }
  CHECK(gf.as_field()(Point{0.5, 0.33}) == doctest::Approx(cubic(Point{0.5, 0.33})).epsilon(1e-13).scale(0));
  CHECK_THROWS_AS(gf.interpolate(Point{1.5, 0.5}), DomainError);
}
