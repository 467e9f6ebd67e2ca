#include "amv/polynomials/mvp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "amv/core/ball_quadrature.hpp"

namespace amv {

PolyBasis::PolyBasis(int n, int m) : n_(n), m_(m) {
  if (n < 1 || n > kMaxDim) throw ConfigError("PolyBasis: dimension out of range");
  if (m < 0 || m > 30) throw ConfigError("PolyBasis: degree must lie in [0, 30]");
  monomials_ = graded_multi_indices(n, m);
}

std::size_t PolyBasis::index(const MultiIndex& alpha) const {
  const auto it = std::find(monomials_.begin(), monomials_.end(), alpha);
  if (it == monomials_.end()) throw ConfigError("PolyBasis: monomial outside the basis");
  return static_cast<std::size_t>(it - monomials_.begin());
}

double PolyBasis::evaluate(const Eigen::VectorXd& c, PointView x) const {
  // powers table, then one product per monomial
  std::array<std::array<double, 32>, kMaxDim> pw{};
  for (int a = 0; a < n_; ++a) {
    pw[a][0] = 1.0;
    for (int e = 1; e <= m_; ++e) pw[a][e] = pw[a][e - 1] * x[a];
  }
  double s = 0.0;
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (c[static_cast<Eigen::Index>(i)] == 0.0) continue;
    double t = c[static_cast<Eigen::Index>(i)];
    for (int a = 0; a < n_; ++a) t *= pw[a][monomials_[i][a]];
    s += t;
  }
  return s;
}

ScalarField PolyBasis::field(const Eigen::VectorXd& c) const {
  std::vector<std::vector<int>> ex;
  std::vector<double> co;
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (c[static_cast<Eigen::Index>(i)] == 0.0) continue;
    ex.push_back(monomials_[i]);
    co.push_back(c[static_cast<Eigen::Index>(i)]);
  }
  if (ex.empty()) return ScalarField::constant(0.0);
  return ScalarField::polynomial(ex, co);
}

Eigen::VectorXd PolyBasis::coefficients(const std::vector<std::pair<MultiIndex, double>>& terms) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& [a, v] : terms) c[static_cast<Eigen::Index>(index(a))] += v;
  return c;
}

MvpConstraintMatrix mvp_constraints(const Norm& norm, int m, const MomentTensor& moments, const MvpOptions& options) {
  const int n = norm.dim();
  if (moments.order() < m) throw ConfigError("mvp_constraints: moments must be computed to the polynomial degree");
  if (moments.norm().dim() != n) throw ConfigError("mvp_constraints: moment tensor belongs to another dimension");
  // noise check against the smallest nonzero moment
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& a : graded_multi_indices(n, m)) {
    if (std::abs(moments(a)) > 1e-300) smallest = std::min(smallest, std::abs(moments(a)));
  }
  const double worst = moments.max_std_error();
  if (worst > options.max_relative_std_error * smallest) {
    std::ostringstream os;
    os << "mvp_constraints: moment standard error " << worst << " exceeds " << options.max_relative_std_error << " x smallest nonzero moment "
       << smallest << "; the rank decision would not be reliable";
    throw NumericalError(os.str());
  }
  MvpConstraintMatrix out{PolyBasis(n, m), {}, {}, {}};
  std::vector<Eigen::VectorXd> rows;
  for (int k = 2; k <= m; k += 2) {
    for (const auto& beta : graded_multi_indices(n, m - k)) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.basis.size()));
      for (const auto& alpha : multi_indices(n, k)) {
        const double ma = moments(alpha);
        if (ma == 0.0) continue;
        MultiIndex gamma(n);
        double binom = 1.0;
        for (int i = 0; i < n; ++i) {
          gamma[i] = beta[i] + alpha[i];
          binom *= binomial(gamma[i], alpha[i]);
        }
        row[static_cast<Eigen::Index>(out.basis.index(gamma))] += ma * binom;
      }
      rows.push_back(row);
      out.row_order.push_back(k);
      out.row_target.push_back(beta);
    }
  }
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.basis.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out.matrix.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return out;
}

MvKernel mv_kernel(const MvpConstraintMatrix& c, const MvpOptions& options) {
  MvKernel out{c.basis};
  const auto cols = static_cast<Eigen::Index>(c.basis.size());
  if (c.matrix.rows() == 0) {
    out.dimension = c.basis.size();
    out.vectors = Eigen::MatrixXd::Identity(cols, cols);
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  // pad to a square system so V is the full right basis
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(std::max(c.matrix.rows(), cols), cols);
  a.topRows(c.matrix.rows()) = c.matrix;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  out.singular_values = s;
  const double smax = s.size() ? s[0] : 0.0;
  double min_kept = std::numeric_limits<double>::infinity(), max_dropped = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double rel = smax > 0.0 ? s[i] / smax : 0.0;
    if (rel > options.threshold) {
      ++out.rank;
      min_kept = std::min(min_kept, s[i]);
    } else {
      max_dropped = std::max(max_dropped, s[i]);
    }
    if (rel >= options.threshold && rel <= options.ill_conditioned_upper) out.ill_conditioned = true;
  }
  out.dimension = static_cast<std::size_t>(cols) - out.rank;
  out.vectors = svd.matrixV().rightCols(static_cast<Eigen::Index>(out.dimension));
  out.gap = min_kept / std::max(max_dropped, std::numeric_limits<double>::epsilon() * smax);
  return out;
}

MvKernel mv_kernel(const Norm& norm, int m, const MvpOptions& options) {
  const auto mom = second_moment_tensor(norm, std::max(2, m));
  return mv_kernel(mvp_constraints(norm, m, mom, options), options);
}

CsvTable MvKernel::basis_table() const {
  std::vector<std::string> header{"basis"};
  for (int a = 0; a < basis.dim(); ++a) header.push_back("e" + std::to_string(a + 1));
  header.emplace_back("coefficient");
  CsvTable t(header);
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double v = vectors(static_cast<Eigen::Index>(i), j);
      if (std::abs(v) < 1e-14) continue;
      std::vector<std::string> row{std::to_string(j)};
      for (const int e : basis.monomials()[i]) row.push_back(std::to_string(e));
      row.push_back(format_number(v));
      t.add_row(row);
    }
  }
  return t;
}

MvpCheck verify_mvp(const PolyBasis& basis, const Eigen::VectorXd& c, const Norm& norm, const std::vector<double>& radii, std::size_t count,
                    std::uint64_t seed, int centers) {
  const int n = basis.dim();
  struct Cell {
    double dev = 0.0, se = 0.0, scale = 0.0;
    Point x;
  };
  std::vector<Cell> cells(radii.size() * static_cast<std::size_t>(centers));
  parallel_for(cells.size(), [&](std::size_t task) {
    const std::size_t j = task / static_cast<std::size_t>(centers), k = task % static_cast<std::size_t>(centers);
    Rng rng(stream_seed(seed, {0x6d7670ULL, k}));
    Point x(n);
    for (auto& v : x) v = rng.uniform(-0.5, 0.5);
    const BallQuadrature q(norm, count, SamplingMode::monte_carlo, stream_seed(seed, {j, k}));
    const double px = basis.evaluate(c, x);
    CompensatedSum s, s2;
    double scale = std::abs(px);
    Point y(n);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto z = q.node(i);
      for (int a = 0; a < n; ++a) y[a] = x[a] + radii[j] * z[a];
      const double v = basis.evaluate(c, y);
      scale = std::max(scale, std::abs(v));
      s.add(v - px);
      s2.add((v - px) * (v - px));
    }
    const double cnt = static_cast<double>(q.size());
    const double mean = s.value() / cnt;
    const double var = std::max(0.0, (s2.value() - cnt * mean * mean) / (cnt - 1.0));
    cells[task] = {mean, std::sqrt(var / cnt), scale, x};
  });
  MvpCheck out;
  std::ostringstream os;
  for (std::size_t task = 0; task < cells.size(); ++task) {
    const auto& cl = cells[task];
    out.max_deviation = std::max(out.max_deviation, std::abs(cl.dev));
    if (cl.se > 0.0) out.max_z = std::max(out.max_z, std::abs(cl.dev) / cl.se);
    if (std::abs(cl.dev) > 4.0 * cl.se + 1e-12 * cl.scale) {
      out.pass = false;
      os << "r = " << radii[task / static_cast<std::size_t>(centers)] << " at (";
      for (std::size_t a = 0; a < cl.x.size(); ++a) os << (a ? ", " : "") << cl.x[a];
      os << "): |A_r P - P| = " << std::abs(cl.dev) << " > 4 stderr = " << 4.0 * cl.se << "\n";
    }
  }
  out.report = os.str();
  return out;
}

CsvTable dimension_table(const std::vector<Norm>& norms, int max_m, const MvpOptions& options) {
  CsvTable t({"norm", "m", "dimension", "rank", "gap", "ill_conditioned"});
  for (const auto& norm : norms) {
    const auto mom = second_moment_tensor(norm, std::max(2, max_m));
    for (int m = 1; m <= max_m; ++m) {
      const auto k = mv_kernel(mvp_constraints(norm, m, mom, options), options);
      t.add_row({norm.descriptor(), std::to_string(m), std::to_string(k.dimension), std::to_string(k.rank), format_number(k.gap),
                 k.ill_conditioned ? "1" : "0"});
    }
  }
  return t;
}

}  // namespace amv
