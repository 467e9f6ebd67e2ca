#include <cmath>
#include <numbers>

#include "amv/heisenberg/h1.hpp"
#include "doctest.h"

using namespace amv;

namespace {

constexpr double kBpz = 1.0 / (3.0 * std::numbers::pi);

H1Point random_point(Rng& rng) { return {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}; }

bool close(const H1Point& a, const H1Point& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.t - b.t) <= tol;
}

// symbolic oracle: d/dx, d/dy, d/dt of x^a y^b t^c
double mono(int a, int b, int c, const H1Point& p) { return std::pow(p.x, a) * std::pow(p.y, b) * std::pow(p.t, c); }

}  // namespace

TEST_CASE("group law") {
  const H1Point e{};
  const H1Point p{0.3, -1.2, 2.5};
  CHECK(close(h1_mul(p, e), p, 0.0));
  CHECK(close(h1_mul(e, p), p, 0.0));
  CHECK(close(h1_mul(H1Point{1, 0, 0}, H1Point{0, 1, 0}), H1Point{1, 1, -2}, 0.0));
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const H1Point a = random_point(rng), b = random_point(rng), c = random_point(rng);
    CHECK(close(h1_mul(h1_mul(a, b), c), h1_mul(a, h1_mul(b, c)), 1e-12));
    CHECK(close(h1_mul(a, h1_inv(a)), e, 1e-12));
    CHECK(close(h1_mul(h1_inv(a), a), e, 1e-12));
  }
}

TEST_CASE("koranyi distance") {
  const H1Point o{};
  CHECK(koranyi_dist(H1Point{1, 2, 3}, H1Point{1, 2, 3}) == 0.0);
  CHECK(koranyi_dist(o, H1Point{1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15).scale(0));
  CHECK(koranyi_dist(o, H1Point{0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-15).scale(0));
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const H1Point g = random_point(rng), p = random_point(rng), q = random_point(rng);
    const double d = koranyi_dist(p, q);
    CHECK(koranyi_dist(h1_mul(g, p), h1_mul(g, q)) == doctest::Approx(d).epsilon(1e-12).scale(0));
    CHECK(koranyi_dist(q, p) == doctest::Approx(d).epsilon(1e-12).scale(0));
    const double s = rng.uniform(0.1, 3.0);
    CHECK(koranyi_dist(h1_dilate(p, s), h1_dilate(q, s)) == doctest::Approx(s * d).epsilon(1e-12).scale(0));
  }
}

TEST_CASE("ball volume and sampler") {
  const double c = std::numbers::pi * std::numbers::pi / 2.0;
  CHECK(koranyi_ball_volume(1.0) == doctest::Approx(c).epsilon(1e-15).scale(0));
  CHECK(koranyi_ball_volume(0.6) / koranyi_ball_volume(0.3) == doctest::Approx(16.0).epsilon(1e-14).scale(0));
  CHECK_THROWS_AS(koranyi_ball_volume(0.0), ConfigError);
  const auto mc = koranyi_volume_mc(1.0, 1000000, 3);
  CHECK(std::abs(mc.value - c) <= 0.005 * c);
  CHECK(std::abs(mc.value - c) <= 3.0 * mc.std_error);
  const auto mc2 = koranyi_volume_mc(2.0, 200000, 4);
  CHECK(std::abs(mc2.value - 16.0 * c) <= 3.0 * mc2.std_error);

  const H1Point p{0.4, -0.3, 1.1};
  KoranyiBallSampler s(p, 0.25, 20000, 5);
  std::size_t n = 0;
  bool inside = true;
  s.for_each([&](const H1Point& q) {
    inside = inside && koranyi_dist(p, q) < 0.25;
    ++n;
  });
  CHECK(inside);
  CHECK(n == 20000);
  CHECK(s.acceptance_rate() == doctest::Approx(c / 8.0).epsilon(0.02).scale(0));
}

TEST_CASE("sub-laplacian against symbolic derivatives") {
  const H1Point p{0.7, -0.4, 1.3};
  CHECK(h1_sub_laplacian(ScalarField::monomial({2, 0, 0}), p) == doctest::Approx(2.0).epsilon(1e-14).scale(0));
  CHECK(h1_sub_laplacian(ScalarField::coordinate(2, 3), p) == 0.0);
  CHECK(h1_sub_laplacian(ScalarField::monomial({1, 0, 1}), p) == doctest::Approx(4.0 * p.y).epsilon(1e-14).scale(0));
  // x^a y^b t^c through X = dx + 2y dt, Y = dy - 2x dt applied twice
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int a = static_cast<int>(rng.next() % 4), b = static_cast<int>(rng.next() % 4), c = static_cast<int>(rng.next() % 3);
    const H1Point q = random_point(rng);
    const auto d = [&](int da, int db, int dc) {
      if (da > a || db > b || dc > c) return 0.0;
      double k = 1.0;
      for (int i = 0; i < da; ++i) k *= a - i;
      for (int i = 0; i < db; ++i) k *= b - i;
      for (int i = 0; i < dc; ++i) k *= c - i;
      return k * mono(a - da, b - db, c - dc, q);
    };
    // X^2 = dxx + 4y dxt + 4y^2 dtt, Y^2 = dyy - 4x dyt + 4x^2 dtt
    const double expected = d(2, 0, 0) + d(0, 2, 0) + 4.0 * (q.x * q.x + q.y * q.y) * d(0, 0, 2) + 4.0 * q.y * d(1, 0, 1) - 4.0 * q.x * d(0, 1, 1);
    CHECK(h1_sub_laplacian(ScalarField::monomial({a, b, c}), q) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("r-laplacian: constants, odd functions and x^2") {
  const H1Point p{0.5, 0.3, -0.2};
  const auto c = h1_r_laplacian(ScalarField::constant(2.0), p, 0.1, 1000, 1);
  CHECK(c.value == 0.0);
  CHECK(c.std_error == 0.0);
  const RadiiSchedule sched(0.5, 0.7, 6);
  for (int axis = 0; axis < 3; ++axis) {
    const auto prof = h1_r_laplacian_profile(ScalarField::coordinate(axis, 3), p, sched, 20000, 9);
    CHECK(std::abs(prof.limit.value) <= 3.0 * prof.limit.error + 1e-12);
  }
  // avg of x^2 over the unit Koranyi ball is 2/(3 pi) at every radius
  const auto e = h1_r_laplacian(ScalarField::monomial({2, 0, 0}), H1Point{}, 0.2, 200000, 2);
  CHECK(std::abs(e.value - 2.0 * kBpz) <= 4.0 * e.std_error);
  CHECK(e.std_error < 1e-3);
  const auto prof = h1_r_laplacian_profile(ScalarField::monomial({2, 0, 0}), p, RadiiSchedule(1.0, 0.7, 10), 100000, 3);
  CHECK(prof.limit.value == doctest::Approx(2.0 * kBpz).epsilon(0.02).scale(0));
}

TEST_CASE("bpz constant") {
  const std::vector<ScalarField> fs = {ScalarField::monomial({2, 0, 0}), ScalarField::monomial({1, 0, 1}), ScalarField::monomial({0, 0, 2})};
  const std::vector<H1Point> pts = {{0.5, 0.3, 0.2}, {-0.4, 0.7, 1.0}, {1.0, -0.5, -0.3}};
  const auto est = bpz_constant_estimate(fs, pts, RadiiSchedule(0.5, 0.7, 10), 100000, 21);
  INFO(est.record().str());
  CHECK(est.c_hat == doctest::Approx(kBpz).epsilon(0.02).scale(0));
  CHECK(est.consistent);
  CHECK(est.notices.empty());
  CHECK(est.table().str().find("ratio_error") != std::string::npos);

  const auto ex = bpz_constant_estimate({ScalarField::coordinate(0, 3), ScalarField::monomial({2, 0, 0})}, {H1Point{0.1, 0.2, 0.3}},
                                        RadiiSchedule(0.5, 0.7, 5), 20000, 1);
  CHECK(ex.notices.size() == 1);
  CHECK(ex.pairs[0].excluded);
  CHECK_THROWS_AS(bpz_constant_estimate({ScalarField::coordinate(0, 3)}, {H1Point{}}, RadiiSchedule(0.5, 0.7, 3), 1000, 1), NumericalError);
}

TEST_CASE("korevaar-schoen density") {
  const auto zero = h1_ks_density(ScalarField::constant(1.0), H1Point{}, 0.1, 1000, 1);
  CHECK(zero.value == 0.0);
  CHECK_FALSE(zero.ratio_defined);
  // f = x at the origin: 1/2 avg x^2 / r^2 = 1/(3 pi)
  const auto lin = h1_ks_density(ScalarField::coordinate(0, 3), H1Point{}, 0.1, 400000, 2);
  CHECK(lin.horizontal_gradient_sq == 1.0);
  CHECK(std::abs(lin.ratio - kBpz) <= 4.0 * lin.std_error);
  // the ratio does not depend on f or p
  const std::vector<std::pair<ScalarField, H1Point>> cases = {{ScalarField::coordinate(2, 3), {0.5, 0.2, 0.0}},
                                                              {ScalarField::monomial({1, 1, 0}), {0.3, -0.8, 0.4}},
                                                              {ScalarField::monomial({0, 0, 2}) + ScalarField::coordinate(1, 3), {0.6, 0.1, -0.5}}};
  for (const auto& [f, p] : cases) {
    const auto k = h1_ks_density(f, p, 0.002, 400000, 3);
    INFO(f.descriptor());
    CHECK(k.ratio == doctest::Approx(kBpz).epsilon(0.05).scale(0));
  }
}
