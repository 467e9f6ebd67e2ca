#include <cmath>

#include "amv/polynomials/mvp.hpp"
#include "doctest.h"

using namespace amv;

namespace {

// Re and Im (x + iy)^k as coefficient vectors
Eigen::VectorXd harmonic_coefficients(const PolyBasis& b, int k, bool imaginary) {
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int j = 0; j <= k; ++j) {
    // i^j: real for even j, imaginary for odd j
    if ((j % 2 == 1) != imaginary) continue;
    const double sign = (j / 2) % 2 == 0 ? 1.0 : -1.0;
    terms.push_back({{k - j, j}, sign * binomial(k, j)});
  }
  return b.coefficients(terms);
}

// rank of a block of orthonormal kernel vectors; entries are O(1), so an absolute cut
std::size_t rank_of(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > 1e-10 ? 1 : 0;
  return r;
}

}  // namespace

TEST_CASE("basis layout") {
  const PolyBasis b(2, 3);
  CHECK(b.size() == 10);
  CHECK(b.monomials().front() == MultiIndex{0, 0});
  CHECK(b.monomials()[1] == MultiIndex{1, 0});
  CHECK(b.monomials()[3] == MultiIndex{2, 0});
  CHECK(PolyBasis(3, 4).size() == 35);
  const auto c = b.coefficients({{{2, 1}, 3.0}, {{0, 0}, -1.0}});
  const double x[2] = {0.5, 2.0};
  CHECK(b.evaluate(c, x) == doctest::Approx(3.0 * 0.25 * 2.0 - 1.0).epsilon(1e-15).scale(0));
  CHECK(b.field(c)(x) == doctest::Approx(0.5).epsilon(1e-15).scale(0));
  CHECK_THROWS_AS(b.index({4, 0}), ConfigError);
}

TEST_CASE("constraints: small cases") {
  // m = 1: no constraints
  const auto e1 = mvp_constraints(Norm::euclidean(2), 1, second_moment_tensor(Norm::euclidean(2), 2));
  CHECK(e1.matrix.rows() == 0);
  CHECK(mv_kernel(e1).dimension == 3);
  // m = 2: one row, (1/4)(P_xx/2 + P_yy/2) -> coefficients of x^2 and y^2 with weight 1/4
  const auto e2 = mvp_constraints(Norm::euclidean(2), 2, second_moment_tensor(Norm::euclidean(2), 2));
  REQUIRE(e2.matrix.rows() == 1);
  const PolyBasis& b = e2.basis;
  CHECK(e2.matrix(0, b.index({2, 0})) == doctest::Approx(0.25).epsilon(1e-15).scale(0));
  CHECK(e2.matrix(0, b.index({0, 2})) == doctest::Approx(0.25).epsilon(1e-15).scale(0));
  CHECK(e2.matrix(0, b.index({1, 1})) == 0.0);
  CHECK(e2.matrix.row(0).cwiseAbs().sum() == doctest::Approx(0.5).epsilon(1e-15).scale(0));
  // sup norm at degree 2: same kernel, constraint scaled by 4/3
  const auto s2 = mvp_constraints(Norm::sup(2), 2, second_moment_tensor(Norm::sup(2), 2));
  CHECK((s2.matrix - e2.matrix * (4.0 / 3.0)).cwiseAbs().maxCoeff() <= 1e-15);
  // every order-k row is a rational combination of moments: Euclidean m = 4, k = 4, beta = 0
  const auto e4 = mvp_constraints(Norm::euclidean(2), 4, second_moment_tensor(Norm::euclidean(2), 4));
  for (Eigen::Index r = 0; r < e4.matrix.rows(); ++r) {
    if (e4.row_order[r] != 4) continue;
    // M_40 = 1/8, M_22 = 1/24 times binomials 1 and 1
    CHECK(e4.matrix(r, e4.basis.index({4, 0})) == doctest::Approx(0.125).epsilon(1e-13).scale(0));
    CHECK(e4.matrix(r, e4.basis.index({2, 2})) == doctest::Approx(1.0 / 24.0).epsilon(1e-13).scale(0));
  }
}

TEST_CASE("constraints refuse noisy moments") {
  MomentOptions opt;
  opt.method = MomentMethod::monte_carlo;
  opt.samples = 20000;
  const auto noisy = second_moment_tensor(Norm::lp(2, 3.0), 4, opt);
  CHECK_THROWS_AS(mvp_constraints(Norm::lp(2, 3.0), 4, noisy), NumericalError);
  CHECK_THROWS_AS(mvp_constraints(Norm::euclidean(2), 4, second_moment_tensor(Norm::euclidean(2), 2)), ConfigError);
}

TEST_CASE("kernel dimensions") {
  for (int m = 1; m <= 6; ++m) {
    const auto k = mv_kernel(Norm::euclidean(2), m);
    CHECK(k.dimension == static_cast<std::size_t>(2 * m + 1));
    CHECK(k.gap >= 100.0);
    CHECK_FALSE(k.ill_conditioned);
    // the classical harmonic polynomials lie in the kernel
    const auto c = mvp_constraints(Norm::euclidean(2), m, second_moment_tensor(Norm::euclidean(2), std::max(2, m)));
    for (int d = 1; d <= m; ++d) {
      for (const bool im : {false, true}) CHECK((c.matrix * harmonic_coefficients(c.basis, d, im)).norm() <= 1e-13);
    }
  }
  const auto l4 = mv_kernel(Norm::lp(2, 4.0), 6);
  CHECK(l4.dimension < 13);
  CHECK(l4.dimension >= 3);
  // three-dimensional Euclidean: harmonic polynomials of degree <= m, dimension (m + 1)^2
  for (int m = 1; m <= 4; ++m) CHECK(mv_kernel(Norm::euclidean(3), m).dimension == static_cast<std::size_t>((m + 1) * (m + 1)));
}

TEST_CASE("kernel nesting and affine content") {
  for (const auto& norm : {Norm::euclidean(2), Norm::lp(2, 4.0), Norm::sup(2), Norm::lp(3, 3.0)}) {
    const int n = norm.dim();
    for (int m = 2; m <= 6; ++m) {
      const auto k = mv_kernel(norm, m);
      const auto lower = mv_kernel(norm, m - 1);
      CHECK(k.dimension >= static_cast<std::size_t>(n + 1));
      // kernel vectors restricted to zero top-degree coefficients span the degree m-1 kernel
      const PolyBasis& b = k.basis;
      std::vector<Eigen::Index> top;
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (total_degree(b.monomials()[i]) == m) top.push_back(static_cast<Eigen::Index>(i));
      }
      Eigen::MatrixXd t(static_cast<Eigen::Index>(top.size()), k.vectors.cols());
      for (std::size_t r = 0; r < top.size(); ++r) t.row(static_cast<Eigen::Index>(r)) = k.vectors.row(top[r]);
      const std::size_t intersection = k.dimension - rank_of(t);
      INFO(norm.descriptor() << " m=" << m);
      CHECK(intersection == lower.dimension);
    }
  }
}

TEST_CASE("independent monte carlo oracle") {
  const Norm e = Norm::euclidean(2);
  const std::vector<double> radii = {0.1, 0.5, 1.0};
  const PolyBasis b3(2, 3);
  const auto one = b3.coefficients({{{0, 0}, 1.0}});
  const auto c0 = verify_mvp(b3, one, e, radii, 1000, 1);
  CHECK(c0.pass);
  CHECK(c0.max_deviation == 0.0);
  const auto re3 = harmonic_coefficients(b3, 3, false);
  CHECK(verify_mvp(b3, re3, e, radii, 20000, 2).pass);

  const auto k = mv_kernel(e, 4);
  for (Eigen::Index j = 0; j < k.vectors.cols(); ++j) {
    const auto chk = verify_mvp(k.basis, k.vectors.col(j), e, radii, 20000, 3 + static_cast<std::uint64_t>(j));
    INFO(chk.report);
    CHECK(chk.pass);
  }
  // corrupted: + 0.01 |x|^2
  Eigen::VectorXd bad = k.vectors.col(0);
  bad[static_cast<Eigen::Index>(k.basis.index({2, 0}))] += 0.01;
  bad[static_cast<Eigen::Index>(k.basis.index({0, 2}))] += 0.01;
  const auto neg = verify_mvp(k.basis, bad, e, radii, 200000, 99);
  CHECK_FALSE(neg.pass);
  CHECK_FALSE(neg.report.empty());
}

TEST_CASE("tables") {
  const auto k = mv_kernel(Norm::euclidean(2), 2);
  const auto t = k.basis_table().str();
  CHECK(t.rfind("basis,e1,e2,coefficient\n", 0) == 0);
  const auto d = dimension_table({Norm::euclidean(2), Norm::lp(2, 4.0)}, 8).str();
  CHECK(d.find("lp:2,6,13,") != std::string::npos);
  CHECK(d.find("lp:2,8,17,") != std::string::npos);
}
