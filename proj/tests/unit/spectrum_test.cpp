#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "deltaspec/forms.hpp"
#include "deltaspec/spectrum.hpp"
#include "support.hpp"

using namespace testing;

namespace {

SparseMatrix sparse_diag(std::initializer_list<double> d) {
  SparseMatrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) {
    m.insert(i, i) = v;
    ++i;
  }
  m.makeCompressed();
  return m;
}

/// 1D Dirichlet Laplacian on n interior points: eigenvalues 2 - 2cos(j pi / (n+1)).
SparseMatrix laplacian_1d(int n) {
  SparseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a.insert(i, i) = 2.0;
    if (i > 0) a.insert(i, i - 1) = -1.0;
    if (i + 1 < n) a.insert(i, i + 1) = -1.0;
  }
  a.makeCompressed();
  return a;
}

SparseMatrix identity(int n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return uniform_vector(1, rng)[0]; });
  return b * b.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

SolverOptions options(int k, double tol = 1e-10) {
  SolverOptions o;
  o.k = k;
  o.tol = tol;
  return o;
}

/// Pencil with the rows and columns of `drop` removed.
SparseMatrix without(const SparseMatrix& a, Eigen::Index drop) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.row() == drop || it.col() == drop) continue;
      t.emplace_back(it.row() - (it.row() > drop), it.col() - (it.col() > drop), it.value());
    }
  SparseMatrix out(n - 1, n - 1);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

TEST_CASE("diagonal pencils") {
  SUBCASE("A = diag(1,2,3), M = I") {
    // Too small for a block iteration; goes through the dense path.
    const SolverOptions o = options(2);
    const SpectrumResult r = lowest_eigenpairs(sparse_diag({1, 2, 3}), identity(3), o);
    REQUIRE(r.converged);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("A = diag(2,2), M = diag(2,1)") {
    const Eigen::VectorXd ev =
        dense_eigen_oracle(Eigen::MatrixXd(sparse_diag({2, 2})), Eigen::MatrixXd(sparse_diag({2, 1})));
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("dense oracle: 1x1 and 2x2 closed forms") {
  Eigen::MatrixXd a(1, 1), m(1, 1);
  a << -3;
  m << 2;
  CHECK(dense_eigen_oracle(a, m)[0] == doctest::Approx(-1.5).epsilon(1e-15));

  Eigen::MatrixXd A(2, 2), M(2, 2);
  A << 2, -1, -1, 3;
  M << 2, 0.5, 0.5, 1;
  // det(A - lM) = (2 - 2l)(3 - l) - (-1 - 0.5 l)^2 = 1.75 l^2 - 9 l + 5.
  const double qa = 1.75, qb = -9.0, qc = 5.0;
  const double disc = std::sqrt(qb * qb - 4 * qa * qc);
  const double l1 = (-qb - disc) / (2 * qa), l2 = (-qb + disc) / (2 * qa);
  const Eigen::VectorXd ev = dense_eigen_oracle(A, M);
  CHECK(std::abs(ev[0] - l1) <= 1e-13 * std::abs(l1));
  CHECK(std::abs(ev[1] - l2) <= 1e-13 * std::abs(l2));
}

TEST_CASE("dense oracle: trace identity on a random 50x50 pencil") {
  std::mt19937_64 rng(50);
  const Eigen::MatrixXd m = random_spd(50, rng);
  const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(50, 50, [&] { return uniform_vector(1, rng)[0]; });
  const Eigen::MatrixXd a = b + b.transpose();
  const Eigen::VectorXd ev = dense_eigen_oracle(a, m);
  const double trace = m.llt().solve(a).trace();
  CHECK(std::abs(ev.sum() - trace) <= 1e-9 * std::abs(trace));
  for (Eigen::Index i = 1; i < ev.size(); ++i) CHECK(ev[i - 1] <= ev[i]);
  // Independent library path.
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, m);
  CHECK((ev - ges.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10 * ges.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("dense oracle errors") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2), m = Eigen::MatrixXd::Identity(2, 2);
  m(1, 1) = -1;
  check_throws_containing([&] { dense_eigen_oracle(a, m); }, "not positive definite");
  check_throws_containing([&] { dense_eigen_oracle(a, Eigen::MatrixXd::Identity(3, 3)); }, "equal size");
  const Eigen::MatrixXd big = Eigen::MatrixXd::Identity(dense_oracle_limit + 1, dense_oracle_limit + 1);
  check_throws_containing([&] { dense_eigen_oracle(big, big); }, "too large");
}

TEST_CASE("LOBPCG reproduces the 1D Laplacian spectrum") {
  const int n = 400;
  for (auto pc : {Preconditioner::jacobi, Preconditioner::shifted_factorization}) {
    SolverOptions o = options(6, 1e-9);
    o.preconditioner = pc;
    o.max_iter = 5000;
    const SpectrumResult r = lowest_eigenpairs(laplacian_1d(n), identity(n), o);
    REQUIRE(r.converged);
    for (int j = 0; j < 6; ++j) {
      const double exact = 2 - 2 * std::cos((j + 1) * pi / (n + 1));
      CHECK(std::abs(r.eigenvalues[j] - exact) <= 1e-8 * exact);
      CHECK(r.residuals[j] <= o.tol);
    }
  }
}

TEST_CASE("LOBPCG output: ascending, M-orthonormal, small residuals") {
  const Partition p = [] {
    GeometryParams g;
    g.box_radius = 4;
    return build_canonical_partition(CanonicalGeometry::star3, g);
  }();
  const DiscreteForm f = assemble_delta_prime(mesh_of(p, 3), InteractionData::uniform(p, 0, 1.5),
                                              BoundaryPolicy::dirichlet);
  const SolverOptions o = options(8, 1e-9);
  const SpectrumResult r = lowest_eigenpairs(f.A, f.M, o);
  REQUIRE(r.converged);
  for (int j = 1; j < 8; ++j) CHECK(r.eigenvalues[j - 1] <= r.eigenvalues[j]);
  const Eigen::MatrixXd gram = r.eigenvectors.transpose() * (f.M * r.eigenvectors);
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
  for (int j = 0; j < 8; ++j) CHECK(r.residuals[j] <= o.tol);
}

TEST_CASE("iterative and dense eigenvalues agree on every canonical geometry") {
  for (const auto& n : canonical(3.0)) {
    CAPTURE(n.label);
    const Partition p = build(n);
    const auto m = mesh_of(p, 2);
    const InteractionData d = InteractionData::uniform(p, 1, 1);
    for (const DiscreteForm& f : {assemble_delta(m, d, BoundaryPolicy::dirichlet),
                                  assemble_delta_prime(m, d, BoundaryPolicy::dirichlet)}) {
      if (f.size() > 2000) continue;
      const SpectrumResult r = lowest_eigenpairs(f.A, f.M, options(5));
      REQUIRE(r.converged);
      const Eigen::VectorXd ev = dense_eigen_oracle(Eigen::MatrixXd(f.A), Eigen::MatrixXd(f.M));
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(r.eigenvalues[j] - ev[j]) <= 1e-8 * std::max(1.0, std::abs(ev[j])));
    }
  }
}

TEST_CASE("same seed, same bits") {
  GeometryParams g;
  g.box_radius = 3;
  const Partition p = build_canonical_partition(CanonicalGeometry::half_plane, g);
  const DiscreteForm f = assemble_delta(mesh_of(p, 4), InteractionData::uniform(p, 1, 1), BoundaryPolicy::dirichlet);
  SolverOptions o = options(5);
  o.seed = 42;
  const SpectrumResult a = lowest_eigenpairs(f.A, f.M, o);
  const SpectrumResult b = lowest_eigenpairs(f.A, f.M, o);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
  CHECK(a.iterations == b.iterations);
  o.seed = 43;
  const SpectrumResult c = lowest_eigenpairs(f.A, f.M, o);
  CHECK((a.eigenvalues - c.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8 * std::abs(a.eigenvalues[0]));
}

TEST_CASE("removing a dof never lowers the ground state") {
  std::mt19937_64 rng(31);
  GeometryParams g;
  g.box_radius = 3;
  const Partition p = build_canonical_partition(CanonicalGeometry::star3, g);
  const DiscreteForm f = assemble_delta(mesh_of(p, 2), InteractionData::uniform(p, 1, 1), BoundaryPolicy::neumann);
  const double base = dense_eigen_oracle(Eigen::MatrixXd(f.A), Eigen::MatrixXd(f.M))[0];
  std::uniform_int_distribution<Eigen::Index> pick(0, f.size() - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index drop = pick(rng);
    const double constrained =
        dense_eigen_oracle(Eigen::MatrixXd(without(f.A, drop)), Eigen::MatrixXd(without(f.M, drop)))[0];
    CHECK(constrained >= base - 1e-12 * std::abs(base));
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  SolverOptions o = options(4, 1e-14);
  o.max_iter = 2;
  o.preconditioner = Preconditioner::jacobi;
  const SpectrumResult r = lowest_eigenpairs(laplacian_1d(500), identity(500), o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.eigenvalues.size() == 4);
  CHECK(r.residuals.maxCoeff() > o.tol);
}

TEST_CASE("eigensolver input errors") {
  SparseMatrix m = sparse_diag({1, -1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  check_throws_containing([&] { lowest_eigenpairs(identity(14), m, options(1)); }, "not positive definite");
  check_throws_containing([&] { lowest_eigenpairs(identity(3), identity(4), options(1)); }, "equal size");
  check_throws_containing([&] { lowest_eigenpairs(identity(3), identity(3), options(0)); }, "at least 1");
  check_throws_containing([] { parse_preconditioner("ilu"); }, "unknown preconditioner 'ilu'");
  CHECK(parse_preconditioner(to_string(Preconditioner::jacobi)) == Preconditioner::jacobi);
}

TEST_CASE("count_below excludes values within 10 tol of the threshold") {
  SpectrumResult r;
  r.eigenvalues = Eigen::VectorXd(4);
  r.eigenvalues << -2.0, -1.0 - 2e-7, -1.0 - 5e-8, 0.5;
  r.tol = 1e-8;
  r.converged = true;
  CHECK(r.count_below(-1.0) == 2);
  CHECK(r.count_below(0.0) == 3);
  CHECK(r.count_below(-3.0) == 0);
}

TEST_CASE("dirichlet eigenvalues do not increase under refinement") {
  GeometryParams g;
  g.box_radius = 3;
  for (auto geom : {CanonicalGeometry::star3, CanonicalGeometry::half_plane}) {
    const Partition p = build_canonical_partition(geom, g);
    const InteractionData d = InteractionData::uniform(p, 1, 1);
    for (bool prime : {false, true}) {
      Eigen::VectorXd prev;
      for (int L = 1; L <= 3; ++L) {
        const auto m = mesh_of(p, L);
        const DiscreteForm f = prime ? assemble_delta_prime(m, d, BoundaryPolicy::dirichlet)
                                     : assemble_delta(m, d, BoundaryPolicy::dirichlet);
        const Eigen::VectorXd all = dense_eigen_oracle(Eigen::MatrixXd(f.A), Eigen::MatrixXd(f.M));
        const Eigen::VectorXd ev = all.head(std::min<Eigen::Index>(5, all.size()));
        for (Eigen::Index j = 0; j < std::min(ev.size(), prev.size()); ++j)
          CHECK(ev[j] <= prev[j] + 1e-12 * std::abs(prev[j]));
        prev = ev;
      }
    }
  }
}
