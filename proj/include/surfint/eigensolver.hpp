#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "surfint/common.hpp"
#include "surfint/sparse.hpp"

namespace surfint {

struct EigenResult {
  std::vector<double> values;                 // ascending
  std::vector<std::vector<double>> vectors;   // M-orthonormal
  std::vector<double> residuals;              // ||A x - lambda M x||_2 / ||x||_M
  double shift_used = 0.0;
  int iterations = 0;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, EigenResult partial = {})
      : Error("eigensolver", what), partial_(std::move(partial)) {}
  const EigenResult& partial() const { return partial_; }

 private:
  EigenResult partial_;
};

// LDL^T factorizations of A - sigma M for varying sigma on one fixed sparsity pattern.
class ShiftedFactorization {
 public:
  ShiftedFactorization(const CsrMatrix& A, const CsrMatrix& M);
  ~ShiftedFactorization();
  ShiftedFactorization(const ShiftedFactorization&) = delete;
  ShiftedFactorization& operator=(const ShiftedFactorization&) = delete;

  // False if the factorization breaks down (zero pivot).
  bool factor(double sigma);
  double sigma() const { return sigma_; }
  int negative_pivots() const;
  double min_abs_pivot() const;
  bool positive_definite() const;
  void solve(std::span<const double> rhs, std::span<double> x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double sigma_ = 0.0;
};

struct EigenOptions {
  int k = 3;
  double tol = 1e-9;
  std::uint64_t seed = 0x5eed;
  std::optional<double> shift;        // used as given
  std::optional<double> shift_hint;   // preferred shift, lowered until A - sigma M is positive definite
  bool verify_multiplicity = true;    // inertia check that no eigenvalue below the k-th was missed
};

double lower_shift(const CsrMatrix& A, const CsrMatrix& M);

EigenResult smallest_eigenpairs(const CsrMatrix& A, const CsrMatrix& M, const EigenOptions& opts);
EigenResult smallest_eigenpairs(const CsrMatrix& A, const CsrMatrix& M, int k, double tol);

// Number of eigenvalues of (A, M) strictly below mu.
int inertia_count(const CsrMatrix& A, const CsrMatrix& M, double mu);

}  // namespace surfint
