#include "amv/weighted/elliptic.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace amv {

double apply_Lw(const ScalarField& u, const WeightField& w, const Eigen::MatrixXd& m, PointView x) {
  const Eigen::MatrixXd h = u.hessian(x);
  const Eigen::VectorXd gu = u.gradient(x);
  double drift = 0.0;
  if (!w.is_constant()) drift = w.gradient(x).dot(m * gu) / w(x);
  return 0.5 * (m * h).trace() + drift;
}

Upwinding parse_upwinding(const std::string& name) {
  if (name == "never") return Upwinding::never;
  if (name == "when_needed" || name == "auto") return Upwinding::when_needed;
  if (name == "always") return Upwinding::always;
  throw ConfigError("unknown upwinding mode '" + name + "'");
}

EllipticSystem assemble_elliptic(const Grid& grid, const Eigen::MatrixXd& diffusion, const VectorFieldFn& drift, const ScalarField& source,
                                 const ScalarField& boundary, Upwinding upwind) {
  const int n = grid.dim();
  if (diffusion.rows() != n || diffusion.cols() != n) throw ConfigError("assemble: diffusion matrix has the wrong size");
  if ((diffusion - diffusion.transpose()).cwiseAbs().maxCoeff() > 1e-14 * diffusion.cwiseAbs().maxCoeff()) {
    throw ConfigError("assemble: diffusion matrix must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diffusion);
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmin > 0.0)) throw ConfigError("assemble: diffusion matrix must be positive definite");
  const auto interior = grid.interior();
  if (interior.empty()) throw ConfigError("assemble: grid has no interior nodes");

  EllipticSystem sys{grid, {}, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())), diffusion};
  const std::size_t size = grid.size();
  // per-row triplets, built in parallel and concatenated in index order
  std::vector<std::vector<Eigen::Triplet<double>>> rows(size);
  std::vector<double> peclet(size, 0.0);
  std::vector<char> upwinded(size, 0), dominant(size, 0);

  parallel_for(size, [&](std::size_t k) {
    auto& out = rows[k];
    const Point x = grid.point(k);
    if (grid.is_boundary(k)) {
      out.emplace_back(k, k, 1.0);
      sys.rhs[static_cast<Eigen::Index>(k)] = boundary(x);
      return;
    }
    const Eigen::VectorXd b = drift ? drift(x) : Eigen::VectorXd::Zero(n);
    double diag = 0.0;
    std::vector<std::pair<std::size_t, double>> off;
    const auto add = [&](std::size_t j, double v) {
      if (j == k) {
        diag += v;
      } else {
        off.emplace_back(j, v);
      }
    };
    double pe = 0.0;
    for (int a = 0; a < n; ++a) pe = std::max(pe, std::abs(b[a]) * grid.h(a) / lmin);
    const bool up = upwind == Upwinding::always || (upwind == Upwinding::when_needed && pe > 2.0);
    for (int a = 0; a < n; ++a) {
      const double h = grid.h(a);
      const std::size_t sa = grid.stride(a);
      add(k + sa, diffusion(a, a) / (h * h));
      add(k - sa, diffusion(a, a) / (h * h));
      add(k, -2.0 * diffusion(a, a) / (h * h));
      if (up) {
        if (b[a] > 0.0) {
          add(k + sa, b[a] / h);
          add(k, -b[a] / h);
        } else {
          add(k, b[a] / h);
          add(k - sa, -b[a] / h);
        }
      } else {
        add(k + sa, b[a] / (2.0 * h));
        add(k - sa, -b[a] / (2.0 * h));
      }
      for (int c = a + 1; c < n; ++c) {
        const double v = 2.0 * diffusion(a, c) / (4.0 * h * grid.h(c));
        if (v == 0.0) continue;
        const std::size_t sc = grid.stride(c);
        add(k + sa + sc, v);
        add(k - sa - sc, v);
        add(k + sa - sc, -v);
        add(k - sa + sc, -v);
      }
    }
    std::sort(off.begin(), off.end());
    double offsum = 0.0;
    out.emplace_back(k, k, diag);
    for (std::size_t i = 0; i < off.size();) {
      std::size_t j = i;
      double v = 0.0;
      while (j < off.size() && off[j].first == off[i].first) v += off[j++].second;
      out.emplace_back(k, off[i].first, v);
      offsum += std::abs(v);
      i = j;
    }
    sys.rhs[static_cast<Eigen::Index>(k)] = source(x);
    peclet[k] = pe;
    upwinded[k] = up ? 1 : 0;
    dominant[k] = std::abs(diag) >= offsum * (1.0 - 1e-12) ? 1 : 0;
  });

  std::vector<Eigen::Triplet<double>> trips;
  for (auto& r : rows) trips.insert(trips.end(), r.begin(), r.end());
  sys.matrix.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.matrix.makeCompressed();
  sys.interior_rows = interior.size();
  for (const auto k : interior) {
    sys.max_peclet = std::max(sys.max_peclet, peclet[k]);
    sys.upwinded_nodes += upwinded[k];
    sys.dominant_rows += dominant[k];
  }
  if (sys.max_peclet > 2.0) {
    std::ostringstream os;
    os << "cell Peclet number " << sys.max_peclet << " exceeds 2";
    os << (sys.upwinded_nodes > 0 ? "; first-order upwinding applied at " + std::to_string(sys.upwinded_nodes) + " nodes" : "; no upwinding");
    sys.warnings.push_back(os.str());
  }
  return sys;
}

EllipticSystem assemble_dirichlet(const Grid& grid, const WeightField& w, const Eigen::MatrixXd& m, const ScalarField& rhs, const ScalarField& boundary,
                                  Upwinding upwind) {
  w.check_positive_on(grid.box());
  VectorFieldFn drift;
  if (!w.is_constant()) {
    drift = [&w, m](PointView x) -> Eigen::VectorXd { return (2.0 / w(x)) * (m * w.gradient(x)); };
  }
  return assemble_elliptic(grid, m, drift, rhs.scaled(2.0), boundary, upwind);
}

BicgstabResult bicgstab(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0, double tol,
                        int max_iter) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
  }
  const auto matvec = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(n);
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (static_cast<std::size_t>(n) + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t blk) {
      const auto lo = static_cast<Eigen::Index>(blk * kBlock);
      const auto hi = std::min<Eigen::Index>(n, lo + static_cast<Eigen::Index>(kBlock));
      for (Eigen::Index i = lo; i < hi; ++i) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, i); it; ++it) s += it.value() * v[it.col()];
        out[i] = s;
      }
    });
  };
  BicgstabResult res;
  res.x = x0;
  Eigen::VectorXd r(n), tmp(n);
  matvec(res.x, tmp);
  r = b - tmp;
  const double bnorm = b.norm() > 0.0 ? b.norm() : 1.0;
  const Eigen::VectorXd r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n), p = Eigen::VectorXd::Zero(n), y(n), z(n), s(n), t(n);
  res.history.push_back(r.norm() / bnorm);
  if (res.history.back() <= tol) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = r_hat.dot(r);
    if (rho_new == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    y = inv_diag.cwiseProduct(p);
    matvec(y, v);
    alpha = rho / r_hat.dot(v);
    s = r - alpha * v;
    if (s.norm() / bnorm <= tol) {
      res.x += alpha * y;
      res.iterations = it;
      res.history.push_back(s.norm() / bnorm);
      res.converged = true;
      break;
    }
    z = inv_diag.cwiseProduct(s);
    matvec(z, t);
    const Eigen::VectorXd kt = inv_diag.cwiseProduct(t);
    omega = kt.dot(inv_diag.cwiseProduct(s)) / kt.squaredNorm();
    res.x += alpha * y + omega * z;
    r = s - omega * t;
    res.iterations = it;
    res.history.push_back(r.norm() / bnorm);
    if (res.history.back() <= tol) {
      res.converged = true;
      break;
    }
    if (omega == 0.0) break;
  }
  // confirm with the true residual
  matvec(res.x, tmp);
  const double true_res = (b - tmp).norm() / bnorm;
  res.history.push_back(true_res);
  res.converged = res.converged && true_res <= tol * 10.0;
  return res;
}

SolveReport solve_dirichlet(const EllipticSystem& system, const SolveOptions& options) {
  const auto& a = system.matrix;
  const Eigen::VectorXd& b = system.rhs;
  const bool direct = options.solver == SolverKind::direct ||
                      (options.solver == SolverKind::automatic && static_cast<std::size_t>(b.size()) <= options.direct_limit);
  Eigen::VectorXd x;
  SolveReport rep{GridFunction(system.grid, Eigen::VectorXd::Zero(b.size()))};
  const double bnorm = b.norm() > 0.0 ? b.norm() : 1.0;
  if (direct) {
    Eigen::SparseMatrix<double> col(a);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(col);
    lu.factorize(col);
    if (lu.info() != Eigen::Success) throw NumericalError("solve_dirichlet: LU factorization failed");
    x = lu.solve(b);
    rep.method = "sparse_lu";
    rep.relative_residual = (b - a * x).norm() / bnorm;
    rep.history = {rep.relative_residual};
    if (rep.relative_residual > options.tol) {
      // polish with a few BiCGStab steps
      const auto pol = bicgstab(a, b, x, options.tol, options.max_iter);
      x = pol.x;
      rep.iterations = pol.iterations;
      rep.relative_residual = pol.history.back();
      rep.method = "sparse_lu+bicgstab";
    }
  } else {
    const auto res = bicgstab(a, b, Eigen::VectorXd::Zero(b.size()), options.tol, options.max_iter);
    x = res.x;
    rep.method = "bicgstab_jacobi";
    rep.iterations = res.iterations;
    rep.history = res.history;
    rep.relative_residual = res.history.back();
    if (!res.converged) {
      std::ostringstream os;
      os << "solve_dirichlet: BiCGStab did not reach tol " << options.tol << " after " << res.iterations << " iterations; residual history:";
      const std::size_t step = std::max<std::size_t>(1, res.history.size() / 10);
      for (std::size_t i = 0; i < res.history.size(); i += step) os << ' ' << res.history[i];
      os << ' ' << res.history.back();
      throw NumericalError(os.str());
    }
  }
  if (rep.relative_residual > options.tol) {
    throw NumericalError("solve_dirichlet: relative residual " + std::to_string(rep.relative_residual) + " above tolerance");
  }
  rep.solution = GridFunction(system.grid, x);
  return rep;
}

SolveReport cheeger_drift_solve(const Grid& grid, const ScalarField& f, const ScalarField& boundary, const ScalarField& rhs, const SolveOptions& options,
                                Upwinding upwind) {
  const int n = grid.dim();
  const VectorFieldFn drift = [&f](PointView x) -> Eigen::VectorXd { return -f.gradient(x); };
  const auto sys = assemble_elliptic(grid, Eigen::MatrixXd::Identity(n, n), drift, rhs, boundary, upwind);
  return solve_dirichlet(sys, options);
}

}  // namespace amv
