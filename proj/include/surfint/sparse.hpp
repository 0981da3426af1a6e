#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace surfint {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Compressed sparse row matrix with sorted, duplicate-free column indices.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  double at(int i, int j) const;
  double max_abs() const;
  // Largest |A_ij - A_ji| over the stored pattern.
  double asymmetry() const;
  double inf_norm() const;
  std::vector<double> diagonal() const;

  // y = A x, rows split across OpenMP threads.
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_serial(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  // x^T A x with a fixed summation order.
  double quadratic(std::span<const double> x) const;

  Eigen::SparseMatrix<double> to_eigen() const;

  // Triplets are stably sorted by (row, col) and duplicates summed in input order.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
  static CsrMatrix identity(int n);
};

// sa * A + sb * B on the union pattern; explicit zeros are kept.
CsrMatrix add(const CsrMatrix& a, double sa, const CsrMatrix& b, double sb);

// Dot product reduced in fixed-size blocks, so the result does not depend on the thread count.
double dot(std::span<const double> x, std::span<const double> y);
double dot_serial(std::span<const double> x, std::span<const double> y);
// y += s x
void axpy(double s, std::span<const double> x, std::span<double> y);

void write_matrix_market(std::ostream& os, const CsrMatrix& a);
CsrMatrix read_matrix_market(std::istream& is);

}  // namespace surfint
