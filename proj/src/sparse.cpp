#include "surfint/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "surfint/common.hpp"

namespace surfint {

namespace {

constexpr std::ptrdiff_t kBlock = 4096;

void require_size(bool ok, const char* what) {
  if (!ok) throw SizeError("femforms", what);
}

}  // namespace

double CsrMatrix::at(int i, int j) const {
  const auto begin = col.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto end = col.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = col[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(val[static_cast<std::size_t>(k)] - at(j, i)));
    }
  }
  return worst;
}

double CsrMatrix::inf_norm() const {
  double m = 0.0;
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s += std::abs(val[static_cast<std::size_t>(k)]);
    }
    m = std::max(m, s);
  }
  return m;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows, cols)));
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size() == static_cast<std::size_t>(cols) && y.size() == static_cast<std::size_t>(rows),
               "matrix-vector size mismatch");
  const int* rp = row_ptr.data();
  const int* ci = col.data();
  const double* v = val.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[static_cast<std::size_t>(ci[k])];
    y[static_cast<std::size_t>(i)] = s;
  }
}

void CsrMatrix::multiply_serial(std::span<const double> x, std::span<double> y) const {
  require_size(x.size() == static_cast<std::size_t>(cols) && y.size() == static_cast<std::size_t>(rows),
               "matrix-vector size mismatch");
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s += val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows));
  multiply(x, y);
  return y;
}

double CsrMatrix::quadratic(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows));
  multiply(x, y);
  return dot(x, y);
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz());
  for (int i = 0; i < rows; ++i) {
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      t.emplace_back(i, col[static_cast<std::size_t>(k)], val[static_cast<std::size_t>(k)]);
    }
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    const Triplet& t = entries[k];
    require_size(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, "triplet index out of range");
    double s = 0.0;
    std::size_t j = k;
    for (; j < entries.size() && entries[j].row == t.row && entries[j].col == t.col; ++j) s += entries[j].value;
    m.col.push_back(t.col);
    m.val.push_back(s);
    ++m.row_ptr[static_cast<std::size_t>(t.row) + 1];
    k = j;
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[static_cast<std::size_t>(i) + 1] += m.row_ptr[static_cast<std::size_t>(i)];
  return m;
}

CsrMatrix CsrMatrix::identity(int n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) m.row_ptr[static_cast<std::size_t>(i)] = i;
  m.col.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m.col[static_cast<std::size_t>(i)] = i;
  m.val.assign(static_cast<std::size_t>(n), 1.0);
  return m;
}

CsrMatrix add(const CsrMatrix& a, double sa, const CsrMatrix& b, double sb) {
  require_size(a.rows == b.rows && a.cols == b.cols, "matrix sum size mismatch");
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = a.cols;
  c.row_ptr.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  c.col.reserve(std::max(a.nnz(), b.nnz()));
  c.val.reserve(std::max(a.nnz(), b.nnz()));
  for (int i = 0; i < a.rows; ++i) {
    auto ka = static_cast<std::size_t>(a.row_ptr[static_cast<std::size_t>(i)]);
    auto kb = static_cast<std::size_t>(b.row_ptr[static_cast<std::size_t>(i)]);
    const auto ea = static_cast<std::size_t>(a.row_ptr[static_cast<std::size_t>(i) + 1]);
    const auto eb = static_cast<std::size_t>(b.row_ptr[static_cast<std::size_t>(i) + 1]);
    while (ka < ea || kb < eb) {
      const int ja = ka < ea ? a.col[ka] : a.cols;
      const int jb = kb < eb ? b.col[kb] : b.cols;
      if (ja == jb) {
        c.col.push_back(ja);
        c.val.push_back(sa * a.val[ka++] + sb * b.val[kb++]);
      } else if (ja < jb) {
        c.col.push_back(ja);
        c.val.push_back(sa * a.val[ka++]);
      } else {
        c.col.push_back(jb);
        c.val.push_back(sb * b.val[kb++]);
      }
    }
    c.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(c.col.size());
  }
  return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_size(x.size() == y.size(), "dot product size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    double s = 0.0;
    const std::ptrdiff_t end = std::min(n, (b + 1) * kBlock);
    for (std::ptrdiff_t i = b * kBlock; i < end; ++i) {
      s += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    }
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double dot_serial(std::span<const double> x, std::span<const double> y) {
  require_size(x.size() == y.size(), "dot product size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  require_size(x.size() == y.size(), "axpy size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += s * x[static_cast<std::size_t>(i)];
}

void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t lower = 0;
  for (int i = 0; i < a.rows; ++i) {
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      if (a.col[static_cast<std::size_t>(k)] <= i) ++lower;
    }
  }
  os << a.rows << ' ' << a.cols << ' ' << lower << '\n';
  char buf[64];
  for (int i = 0; i < a.rows; ++i) {
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.col[static_cast<std::size_t>(k)];
      if (j > i) continue;
      std::snprintf(buf, sizeof buf, "%.17g", a.val[static_cast<std::size_t>(k)]);
      os << i + 1 << ' ' << j + 1 << ' ' << buf << '\n';
    }
  }
}

CsrMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw DomainError("femforms", "MatrixMarket banner missing");
  }
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real") {
    throw DomainError("femforms", "only real coordinate MatrixMarket files are supported");
  }
  const bool symmetric = symmetry == "symmetric";
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {}
  std::istringstream header(line);
  int rows = 0, cols = 0;
  std::size_t n = 0;
  if (!(header >> rows >> cols >> n)) throw DomainError("femforms", "MatrixMarket size line malformed");
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * n : n);
  for (std::size_t k = 0; k < n; ++k) {
    int i = 0, j = 0;
    std::string v;
    if (!(is >> i >> j >> v)) throw DomainError("femforms", "MatrixMarket entry list truncated");
    const double x = std::strtod(v.c_str(), nullptr);
    t.push_back({i - 1, j - 1, x});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, x});
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace surfint
