#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "amv/core/field.hpp"
#include "amv/core/io.hpp"
#include "amv/core/multi_index.hpp"
#include "amv/weighted/moments.hpp"

namespace amv {

/// Polynomials of degree <= m in n variables over the graded-lex monomials.
class PolyBasis {
 public:
  PolyBasis(int n, int m);

  int dim() const { return n_; }
  int degree() const { return m_; }
  /// C(n + m, m)
  std::size_t size() const { return monomials_.size(); }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  /// Column of a monomial; throws ConfigError when absent.
  std::size_t index(const MultiIndex& alpha) const;

  double evaluate(const Eigen::VectorXd& coefficients, PointView x) const;
  ScalarField field(const Eigen::VectorXd& coefficients) const;
  /// Coefficient vector of a catalog polynomial field given as exponents/coefficients.
  Eigen::VectorXd coefficients(const std::vector<std::pair<MultiIndex, double>>& terms) const;

 private:
  int n_, m_;
  std::vector<MultiIndex> monomials_;
};

struct MvpConstraintMatrix {
  PolyBasis basis;
  /// row r enforces that the x^beta coefficient of the order-k aggregate vanishes
  Eigen::MatrixXd matrix;
  std::vector<int> row_order;
  std::vector<MultiIndex> row_target;
};

struct MvpOptions {
  /// refuse when a moment's relative standard error exceeds this
  double max_relative_std_error = 1e-9;
  double threshold = 1e-8;
  /// gaps with sigma / sigma_max in [threshold, ill_conditioned_upper] are flagged
  double ill_conditioned_upper = 1e-6;
};

/// sum_{|alpha|=k} M_alpha d^alpha P / alpha! = 0 for every even k in [2, m],
/// one row per target monomial x^beta with |beta| <= m - k.
MvpConstraintMatrix mvp_constraints(const Norm& norm, int m, const MomentTensor& moments, const MvpOptions& options = {});

struct MvKernel {
  PolyBasis basis;
  std::size_t dimension = 0;
  std::size_t rank = 0;
  /// orthonormal kernel vectors as columns
  Eigen::MatrixXd vectors;
  Eigen::VectorXd singular_values;
  /// smallest kept over largest discarded singular value
  double gap = 0.0;
  bool ill_conditioned = false;

  /// (basis, e1.., coefficient) rows
  CsvTable basis_table() const;
};

MvKernel mv_kernel(const Norm& norm, int m, const MvpOptions& options = {});
MvKernel mv_kernel(const MvpConstraintMatrix& constraints, const MvpOptions& options = {});

struct MvpCheck {
  /// max over radii and centres of |A_r P - P|
  double max_deviation = 0.0;
  /// max of |A_r P - P| / stderr (0 when the deviation is exactly 0)
  double max_z = 0.0;
  bool pass = true;
  std::string report;
};

/// Plain Monte-Carlo ball averages at `centers` random points of [-1/2, 1/2]^n;
/// passes when |A_r P - P| <= 4 stderr + 1e-12 scale everywhere.
MvpCheck verify_mvp(const PolyBasis& basis, const Eigen::VectorXd& coefficients, const Norm& norm, const std::vector<double>& radii,
                    std::size_t count, std::uint64_t seed, int centers = 10);

/// (norm, m, dimension, rank, gap, ill_conditioned) for m = 1..max_m.
CsvTable dimension_table(const std::vector<Norm>& norms, int max_m, const MvpOptions& options = {});

}  // namespace amv
