#ifndef DELTASPEC_SPECTRUM_HPP
#define DELTASPEC_SPECTRUM_HPP

#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace deltaspec {

enum class Preconditioner {
  /// Diagonal of A - sigma M with sigma below the current lowest Ritz value.
  jacobi,
  /// Sparse LDLT factorisation of A - sigma M with sigma certified below the spectrum.
  shifted_factorization,
};

Preconditioner parse_preconditioner(const std::string& name);
std::string to_string(Preconditioner p);

struct SolverOptions {
  int k = 6;
  double tol = 1e-8;
  int max_iter = 1000;
  std::uint64_t seed = 1;
  /// Serial reductions only; the implementation is serial either way.
  bool deterministic = true;
  Preconditioner preconditioner = Preconditioner::shifted_factorization;
  /// Block size is k + padding.
  int padding = 5;
};

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending, k entries
  Eigen::MatrixXd eigenvectors;  // M-orthonormal columns
  /// sqrt(sum_i r_i^2 / M_ii) with r = A v - lambda M v, ||v||_M = 1.
  Eigen::VectorXd residuals;
  int iterations = 0;
  bool converged = false;
  double shift = 0.0;
  Preconditioner preconditioner = Preconditioner::shifted_factorization;
  double tol = 0.0;

  /// Eigenvalues below threshold - 10 tol.
  int count_below(double threshold) const;
};

/// k lowest eigenpairs of A v = lambda M v by block LOBPCG. Non-convergence is
/// reported through `converged`, never thrown. Throws if M is not positive definite.
SpectrumResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& M,
                                 const SolverOptions& opts);

/// Full ascending spectrum via Cholesky of M, congruence and cyclic Jacobi rotations.
Eigen::VectorXd dense_eigen_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M);
inline constexpr Eigen::Index dense_oracle_limit = 2500;

}  // namespace deltaspec

#endif  // DELTASPEC_SPECTRUM_HPP
