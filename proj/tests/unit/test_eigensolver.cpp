#include "doctest.h"

#include <Eigen/Dense>
#include <numbers>

#include "fixtures.hpp"
#include "surfint/eigensolver.hpp"

using namespace surfint;
using std::numbers::pi;

namespace {

CsrMatrix diag(std::vector<double> d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  return CsrMatrix::from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), std::move(t));
}

// P1 discretization of -u'' - alpha delta_0 on [-a, a] with Dirichlet ends.
std::pair<CsrMatrix, CsrMatrix> chain_1d(double a, double h, double alpha) {
  const int cells = static_cast<int>(std::lround(2 * a / h));
  const int n = cells - 1;
  std::vector<Triplet> K, M;
  for (int i = 0; i < n; ++i) {
    K.push_back({i, i, 2.0 / h});
    M.push_back({i, i, 4.0 * h / 6.0});
    if (i + 1 < n) {
      K.push_back({i, i + 1, -1.0 / h});
      K.push_back({i + 1, i, -1.0 / h});
      M.push_back({i, i + 1, h / 6.0});
      M.push_back({i + 1, i, h / 6.0});
    }
  }
  K.push_back({n / 2, n / 2, -alpha});
  return {CsrMatrix::from_triplets(n, n, std::move(K)), CsrMatrix::from_triplets(n, n, std::move(M))};
}

std::vector<double> dense_eigenvalues(const CsrMatrix& A, const CsrMatrix& M) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(A.to_eigen());
  const Eigen::MatrixXd m = Eigen::MatrixXd(M.to_eigen());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  const Eigen::VectorXd v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("diagonal problem") {
  const auto A = diag({1, 2, 3, 4});
  const auto M = CsrMatrix::identity(4);
  const auto r = smallest_eigenpairs(A, M, 2, 1e-9);
  REQUIRE(r.values.size() == 2);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.values[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lower shift") {
  const double s1 = lower_shift(diag({1, 2, 3}), CsrMatrix::identity(3));
  CHECK(s1 < 1.0);
  CHECK(inertia_count(diag({1, 2, 3}), CsrMatrix::identity(3), s1) == 0);
  CHECK(lower_shift(diag({-1, -1, -1}), CsrMatrix::identity(3)) < -1.0);
}

TEST_CASE("inertia count") {
  const auto A = diag({-3, -2, -0.5});
  const auto M = CsrMatrix::identity(3);
  CHECK(inertia_count(A, M, -1.0) == 2);
  CHECK(inertia_count(A, M, lower_shift(A, M)) == 0);
  CHECK_THROWS_AS(inertia_count(A, M, -2.0), SolverError);
}

TEST_CASE("one-dimensional point interaction chain") {
  const auto [A, M] = chain_1d(20.0, 0.01, 2.0);
  const auto r = smallest_eigenpairs(A, M, 1, 1e-9);
  CHECK(r.values[0] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("agrees with a dense solver including degenerate pairs") {
  // The circle has doubly degenerate angular modes.
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto p = fixture::make(g, 0.45, MaterialData::constant(g, 5.0, 0.8));
  for (auto which : {FormKind::Delta, FormKind::DeltaPrime}) {
    const auto A = which == FormKind::Delta ? p.F.A_delta() : p.F.A_deltaprime();
    const auto& M = p.F.mass(which);
    const auto dense = dense_eigenvalues(A, M);
    EigenOptions o;
    o.k = 6;
    const auto r = smallest_eigenpairs(A, M, o);
    for (int i = 0; i < o.k; ++i) {
      CHECK(r.values[static_cast<std::size_t>(i)] == doctest::Approx(dense[static_cast<std::size_t>(i)]).epsilon(1e-9));
      CHECK(r.residuals[static_cast<std::size_t>(i)] <= o.tol);
    }
    for (std::size_t i = 0; i < r.vectors.size(); ++i) {
      const auto Mx = M * r.vectors[i];
      for (std::size_t j = 0; j < r.vectors.size(); ++j) {
        CHECK(dot_serial(r.vectors[j], Mx) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-8));
      }
      const double rq = A.quadratic(r.vectors[i]) / M.quadratic(r.vectors[i]);
      CHECK(std::abs(rq - r.values[i]) <= 10 * o.tol * std::max(1.0, std::abs(r.values[i])));
    }
  }
}

TEST_CASE("shift invariance") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 2.0, 2.0));
  const auto A = p.F.A_delta();
  const auto& M = p.F.M_cont;
  EigenOptions a, b;
  a.k = b.k = 3;
  a.shift = -3.0;
  b.shift = -6.0;
  const auto ra = smallest_eigenpairs(A, M, a);
  const auto rb = smallest_eigenpairs(A, M, b);
  const auto rc = smallest_eigenpairs(A, M, 3, 1e-9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ra.values[i] == doctest::Approx(rb.values[i]).epsilon(1e-9));
    CHECK(rc.values[i] == doctest::Approx(rb.values[i]).epsilon(1e-9));
  }
  CHECK(ra.shift_used == -3.0);
  CHECK(rb.values[0] > b.shift.value());
  CHECK(rc.values[0] > lower_shift(A, M));
}

TEST_CASE("eigenvalues above the threshold are still valid pairs") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 1.0, 1.0));
  const auto r = smallest_eigenpairs(p.F.A_delta(), p.F.M_cont, 8, 1e-9);
  CHECK(r.values.back() > 0.0);
  for (double res : r.residuals) CHECK(res <= 1e-9);
}

TEST_CASE("refinement lowers eigenvalues on nested meshes") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto mat = MaterialData::constant(g, 2.0, 2.0);
  const auto coarse = triangulate(g, 0.5);
  const auto fine = refine_uniform(coarse);
  auto solve = [&](const Mesh& m) {
    const auto F = assemble(m, build_dofs(m, DofKind::Continuous), build_dofs(m, DofKind::Broken), mat);
    return std::pair{smallest_eigenpairs(F.A_delta(), F.M_cont, 3, 1e-9),
                     smallest_eigenpairs(F.A_deltaprime(), F.M_brok, 3, 1e-9)};
  };
  const auto [c1, c2] = solve(coarse);
  const auto [f1, f2] = solve(fine);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(f1.values[i] <= c1.values[i] + 1e-9);
    CHECK(f2.values[i] <= c2.values[i] + 1e-9);
  }
}

TEST_CASE("unreachable tolerance reports partial results") {
  const auto [A, M] = chain_1d(5.0, 0.05, 2.0);
  EigenOptions o;
  o.k = 2;
  o.tol = 1e-300;
  try {
    smallest_eigenpairs(A, M, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK_FALSE(e.partial().values.empty());
    CHECK(std::string(e.what()).rfind("eigensolver:", 0) == 0);
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(smallest_eigenpairs(diag({1, 2}), CsrMatrix::identity(2), 0, 1e-9), SolverError);
  CHECK_THROWS_AS(smallest_eigenpairs(diag({1, 2}), CsrMatrix::identity(2), 3, 1e-9), SolverError);
  CHECK_THROWS_AS(smallest_eigenpairs(diag({1, 2}), CsrMatrix::identity(3), 1, 1e-9), SolverError);
}
