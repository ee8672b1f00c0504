#include "deltaspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "deltaspec/geometry.hpp"

namespace deltaspec {

Preconditioner parse_preconditioner(const std::string& name) {
  if (name == "jacobi") return Preconditioner::jacobi;
  if (name == "shifted_factorization" || name == "ldlt") return Preconditioner::shifted_factorization;
  throw Error("unknown preconditioner '" + name + "'");
}

std::string to_string(Preconditioner p) {
  return p == Preconditioner::jacobi ? "jacobi" : "shifted_factorization";
}

int SpectrumResult::count_below(double threshold) const {
  int n = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] < threshold - 10.0 * tol) ++n;
  return n;
}

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Block = Eigen::MatrixXd;
using LDLT = Eigen::SimplicialLDLT<Sparse>;

// Removes the M-projection onto the M-orthonormal `basis`; two passes.
void project_out(Block& v, const Block& basis, const Block& m_basis) {
  if (basis.cols() == 0 || v.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) v -= basis * (m_basis.transpose() * v);
}

// M-orthonormalises the columns of v, dropping numerically dependent directions.
void m_orthonormalize(Block& v, const Sparse& M) {
  if (v.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    Block g = v.transpose() * (M * v);
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Block> es(g);
    const Eigen::VectorXd d = es.eigenvalues();
    const double top = d.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = d.size() - 1; i >= 0; --i)
      if (d[i] > 1e-13 * top && d[i] > 0.0) keep.push_back(i);
    Block q(v.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      q.col(static_cast<Eigen::Index>(j)) = v * es.eigenvectors().col(keep[j]) / std::sqrt(d[keep[j]]);
    v = std::move(q);
    if (v.cols() == 0) return;
  }
}

struct Factor {
  LDLT ldlt;
  double sigma = 0.0;
};

// Factorises A - sigma M; success means it is positive definite.
bool try_factor(Factor& f, const Sparse& A, const Sparse& M, double sigma) {
  const Sparse k = A - sigma * M;
  f.ldlt.compute(k);
  if (f.ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = f.ldlt.vectorD();
  if (!(d.minCoeff() > 0.0) || !d.allFinite()) return false;
  f.sigma = sigma;
  return true;
}

Eigen::VectorXd residual_norms(const Block& r, const Eigen::VectorXd& mdiag) {
  Eigen::VectorXd out(r.cols());
  for (Eigen::Index j = 0; j < r.cols(); ++j) out[j] = std::sqrt((r.col(j).array().square() / mdiag.array()).sum());
  return out;
}

SpectrumResult dense_fallback(const Sparse& A, const Sparse& M, const SolverOptions& opts) {
  const Block a(A), m(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Block> es(a, m);
  if (es.info() != Eigen::Success) throw Error("mass matrix is not positive definite");
  SpectrumResult res;
  const int k = std::min<int>(opts.k, static_cast<int>(A.rows()));
  res.eigenvalues = es.eigenvalues().head(k);
  res.eigenvectors = es.eigenvectors().leftCols(k);
  const Block r = A * res.eigenvectors - M * res.eigenvectors * res.eigenvalues.asDiagonal();
  res.residuals = residual_norms(r, M.diagonal());
  res.converged = true;
  res.tol = opts.tol;
  res.preconditioner = opts.preconditioner;
  return res;
}

}  // namespace

SpectrumResult lowest_eigenpairs(const Sparse& A, const Sparse& M, const SolverOptions& opts) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n) throw Error("A and M must be square and of equal size");
  if (opts.k < 1) throw Error("eigenvalue count k must be at least 1");
  if (!(opts.tol > 0.0)) throw Error("tolerance must be positive");
  const Eigen::VectorXd mdiag = M.diagonal();
  if (!(mdiag.minCoeff() > 0.0)) throw Error("mass matrix is not positive definite");
  const int m = opts.k + std::max(0, opts.padding);
  if (n <= 3 * m) return dense_fallback(A, M, opts);

  Eigen::SimplicialLLT<Sparse> mcheck(M);
  if (mcheck.info() != Eigen::Success) throw Error("mass matrix is not positive definite");

  SpectrumResult res;
  res.tol = opts.tol;
  res.preconditioner = opts.preconditioner;

  std::unique_ptr<Factor> factor;
  bool reshifted = false;
  if (opts.preconditioner == Preconditioner::shifted_factorization) {
    factor = std::make_unique<Factor>();
    double sigma = -1.0;
    int tries = 0;
    while (!try_factor(*factor, A, M, sigma)) {
      sigma = 2.0 * sigma - 1.0;
      if (++tries > 80) throw Error("no positive definite shift found");
    }
  }
  const Eigen::VectorXd adiag = A.diagonal();

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Block x(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  m_orthonormalize(x, M);
  if (x.cols() < m) throw Error("random start block is rank deficient");

  auto rayleigh_ritz = [&](const Block& basis, int want, Block& vecs, Eigen::VectorXd& vals) {
    Block h = basis.transpose() * (A * basis);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Block> es(h);
    vals = es.eigenvalues().head(want);
    vecs = basis * es.eigenvectors().leftCols(want);
  };

  Eigen::VectorXd theta;
  rayleigh_ritz(x, m, x, theta);
  Block p(n, 0);
  Eigen::VectorXd res_norm;
  int it = 0;
  for (;; ++it) {
    Block mx = M * x;
    Block r = A * x - mx * theta.asDiagonal();
    res_norm = residual_norms(r, mdiag);
    std::vector<Eigen::Index> active;
    bool done = true;
    for (Eigen::Index j = 0; j < m; ++j) {
      const bool ok = res_norm[j] <= opts.tol * std::max(1.0, std::abs(theta[j]));
      if (j < opts.k && !ok) done = false;
      if (!ok) active.push_back(j);
    }
    if (done) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;

    if (factor && !reshifted && res_norm[0] <= 1e-3 * std::max(1.0, std::abs(theta[0]))) {
      reshifted = true;
      const double target = theta[0] - 0.1 * (theta[m - 1] - theta[0]) - 1e-3 * std::max(1.0, std::abs(theta[0]));
      if (target > factor->sigma) {
        auto trial = std::make_unique<Factor>();
        if (try_factor(*trial, A, M, target)) factor = std::move(trial);
      }
    }

    Block w(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) w.col(static_cast<Eigen::Index>(j)) = r.col(active[j]);
    if (factor) {
      w = factor->ldlt.solve(w).eval();
    } else {
      const double sigma = std::min(theta[0] - 1.0, (adiag.array() / mdiag.array()).minCoeff() - 1.0);
      const Eigen::ArrayXd d = adiag.array() - sigma * mdiag.array();
      w = (w.array().colwise() / d).matrix();
    }
    project_out(w, x, mx);
    m_orthonormalize(w, M);
    Block pa(n, 0);
    if (p.cols() > 0) {
      pa.resize(n, static_cast<Eigen::Index>(active.size()));
      for (std::size_t j = 0; j < active.size(); ++j) pa.col(static_cast<Eigen::Index>(j)) = p.col(active[j]);
      project_out(pa, x, mx);
      if (w.cols() > 0) project_out(pa, w, M * w);
      m_orthonormalize(pa, M);
    }
    Block s(n, x.cols() + w.cols() + pa.cols());
    s << x, w, pa;
    Block xnew;
    Eigen::VectorXd thnew;
    rayleigh_ritz(s, m, xnew, thnew);
    p = xnew - x * (mx.transpose() * xnew);
    x = std::move(xnew);
    theta = std::move(thnew);
  }
  res.iterations = it;
  res.shift = factor ? factor->sigma : 0.0;
  res.eigenvalues = theta.head(opts.k);
  res.eigenvectors = x.leftCols(opts.k);
  res.residuals = res_norm.head(opts.k);
  return res;
}

Eigen::VectorXd dense_eigen_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || M.rows() != n || M.cols() != n) throw Error("A and M must be square and of equal size");
  if (n > dense_oracle_limit) throw Error("dimension too large for the dense oracle");
  // Cholesky M = L L^T.
  std::vector<double> l(static_cast<std::size_t>(n * n), 0.0);
  auto L = [&](Eigen::Index i, Eigen::Index j) -> double& { return l[static_cast<std::size_t>(i * n + j)]; };
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = M(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0.0)) throw Error("mass matrix is not positive definite");
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = M(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  // C = L^{-1} A L^{-T}: forward substitution on columns, then on rows.
  std::vector<double> c(static_cast<std::size_t>(n * n));
  auto C = [&](Eigen::Index i, Eigen::Index j) -> double& { return c[static_cast<std::size_t>(i * n + j)]; };
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = A(i, j);
      for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * C(k, j);
      C(i, j) = s / L(i, i);
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = C(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= C(i, k) * L(j, k);
      C(i, j) = s / L(j, j);
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) C(i, j) = C(j, i) = 0.5 * (C(i, j) + C(j, i));

  double total = 0.0;
  for (double v : c) total += v * v;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += 2.0 * C(i, j) * C(i, j);
    if (off <= 1e-24 * total || off == 0.0) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = C(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (C(q, q) - C(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t), sn = t * cs;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = C(k, p), akq = C(k, q);
          C(k, p) = cs * akp - sn * akq;
          C(k, q) = sn * akp + cs * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = C(p, k), aqk = C(q, k);
          C(p, k) = cs * apk - sn * aqk;
          C(q, k) = sn * apk + cs * aqk;
        }
        C(p, q) = C(q, p) = 0.0;
      }
  }
  Eigen::VectorXd ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev[i] = C(i, i);
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

}  // namespace deltaspec
