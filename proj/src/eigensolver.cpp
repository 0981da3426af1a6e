#include "surfint/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace surfint {

namespace {

using Vec = std::vector<double>;

void require(bool ok, const std::string& what) {
  if (!ok) throw SolverError(what);
}

}  // namespace

struct ShiftedFactorization::Impl {
  CsrMatrix A;
  CsrMatrix M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool analyzed = false;
  bool ok = false;
};

ShiftedFactorization::ShiftedFactorization(const CsrMatrix& A, const CsrMatrix& M) : impl_(std::make_unique<Impl>()) {
  require(A.rows == A.cols && M.rows == M.cols && A.rows == M.rows, "A and M must be square of equal size");
  require(A.rows > 0, "empty problem");
  impl_->A = A;
  impl_->M = M;
}

ShiftedFactorization::~ShiftedFactorization() = default;

bool ShiftedFactorization::factor(double sigma) {
  sigma_ = sigma;
  // The union pattern (explicit zeros kept) is the same for every sigma, so one
  // symbolic analysis serves all shifts. Symmetry lets the CSR arrays act as CSC.
  const CsrMatrix S = add(impl_->A, 1.0, impl_->M, -sigma);
  const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::ColMajor, int>> view(
      S.rows, S.cols, static_cast<Eigen::Index>(S.nnz()), S.row_ptr.data(), S.col.data(), S.val.data());
  const Eigen::SparseMatrix<double> E = view;
  if (!impl_->analyzed) {
    impl_->ldlt.analyzePattern(E);
    impl_->analyzed = true;
  }
  impl_->ldlt.factorize(E);
  impl_->ok = impl_->ldlt.info() == Eigen::Success && impl_->ldlt.vectorD().allFinite();
  return impl_->ok;
}

int ShiftedFactorization::negative_pivots() const {
  require(impl_->ok, "no valid factorization");
  const auto d = impl_->ldlt.vectorD();
  return static_cast<int>((d.array() < 0.0).count());
}

double ShiftedFactorization::min_abs_pivot() const {
  if (!impl_->ok) return 0.0;
  return impl_->ldlt.vectorD().cwiseAbs().minCoeff();
}

bool ShiftedFactorization::positive_definite() const {
  return impl_->ok && (impl_->ldlt.vectorD().array() > 0.0).all();
}

void ShiftedFactorization::solve(std::span<const double> rhs, std::span<double> x) const {
  require(impl_->ok, "no valid factorization");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::Map<Eigen::VectorXd> out(x.data(), static_cast<Eigen::Index>(x.size()));
  out = impl_->ldlt.solve(b);
}

namespace {

double lower_shift_with(ShiftedFactorization& F, const CsrMatrix& A, const CsrMatrix& M) {
  const auto d = M.diagonal();
  const double dmin = *std::min_element(d.begin(), d.end());
  require(dmin > 0.0, "mass matrix has a non-positive diagonal entry");
  double sigma = -1.0 - A.inf_norm() / dmin;
  for (int attempt = 0; attempt <= 40; ++attempt) {
    if (F.factor(sigma) && F.positive_definite()) return sigma;
    sigma *= 2.0;
  }
  throw SolverError("no positive definite shift found after 40 doublings");
}

struct RitzPairs {
  Vec values;
  std::vector<Vec> vectors;
  Vec residuals;
  int iterations = 0;
  bool converged = false;
};

double true_residual(const CsrMatrix& A, const CsrMatrix& M, const Vec& y, double lambda) {
  const Vec Ay = A * y;
  const Vec My = M * y;
  const double ynorm = std::sqrt(dot(y, My));
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = Ay[i] - lambda * My[i];
    s += r * r;
  }
  return std::sqrt(s) / ynorm;
}

// Full-reorthogonalization Lanczos on (A - sigma M)^{-1} M in the M inner product,
// deflated against `locked`. Returns the `want` smallest eigenpairs found.
class Lanczos {
 public:
  Lanczos(const CsrMatrix& A, const CsrMatrix& M, const ShiftedFactorization& F, const std::vector<Vec>& locked)
      : A_(A), M_(M), F_(F), locked_(locked), n_(static_cast<std::size_t>(A.rows)) {}

  RitzPairs run(int want, double tol, std::uint64_t seed, int max_iter, bool check_convergence = true) {
    RitzPairs best;
    const int room = static_cast<int>(n_) - static_cast<int>(locked_.size());
    if (room <= 0) return best;
    max_iter = std::min(max_iter, room);
    want = std::min(want, room);

    Vec q(n_);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto& x : q) x = U(rng);
    orthogonalize(q);
    if (!normalize(q)) return best;
    Q_.clear();
    alpha_.clear();
    beta_.clear();
    Q_.push_back(q);

    for (int j = 0; j < max_iter; ++j) {
      const Vec Mq = M_ * Q_.back();
      Vec w(n_);
      F_.solve(Mq, w);
      const double a = dot(Mq, w);
      alpha_.push_back(a);
      axpy(-a, Q_.back(), w);
      if (Q_.size() > 1) axpy(-beta_.back(), Q_[Q_.size() - 2], w);
      orthogonalize(w);
      orthogonalize(w);
      const Vec Mw = M_ * w;
      const double b = std::sqrt(std::max(0.0, dot(w, Mw)));
      const int m = j + 1;
      const bool exhausted = b <= 1e-13 * std::abs(a) || m == max_iter;
      if (check_convergence && m >= want && (m % 5 == 0 || exhausted)) {
        if (extract(want, tol, w, b, best, exhausted) || exhausted) {
          best.iterations = m;
          return best;
        }
      } else if (!check_convergence && exhausted) {
        extract(want, tol, w, b, best, true);
        best.iterations = m;
        return best;
      }
      if (exhausted) break;
      beta_.push_back(b);
      for (auto& x : w) x /= b;
      Q_.push_back(std::move(w));
    }
    if (!check_convergence) {
      const Vec zero(n_, 0.0);
      extract(want, tol, zero, 0.0, best, true);
    }
    best.iterations = static_cast<int>(alpha_.size());
    return best;
  }

 private:
  void orthogonalize(Vec& w) const {
    const Vec Mw = M_ * w;
    for (const auto& x : locked_) axpy(-dot(x, Mw), x, w);
    for (const auto& x : Q_) axpy(-dot(x, Mw), x, w);
  }

  bool normalize(Vec& q) const {
    const Vec Mq = M_ * q;
    const double s = std::sqrt(dot(q, Mq));
    if (!(s > 0.0)) return false;
    for (auto& x : q) x /= s;
    return true;
  }

  // Ritz extraction; true when all `want` pairs meet the tolerance.
  bool extract(int want, double tol, const Vec& w, double b, RitzPairs& out, bool force) const {
    const auto m = static_cast<Eigen::Index>(alpha_.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = alpha_[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta_[static_cast<std::size_t>(i)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double sigma = F_.sigma();
    const double theta_floor = 1e-14 * es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(es.eigenvalues()(i)) > theta_floor) order.push_back(i);
    }
    auto lambda = [&](Eigen::Index i) { return sigma + 1.0 / es.eigenvalues()(i); };
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return lambda(x) < lambda(y); });
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(want), order.size());

    // ||A y - lambda M y|| = |s_last / theta| * ||(A - sigma M) w|| for the unnormalized next vector w.
    double shifted_norm = 0.0;
    if (b > 0.0) {
      const Vec Aw = A_ * w;
      const Vec Mw = M_ * w;
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double r = Aw[i] - sigma * Mw[i];
        s += r * r;
      }
      shifted_norm = std::sqrt(s);
    }
    bool estimates_ok = take == static_cast<std::size_t>(want);
    for (std::size_t k = 0; k < take; ++k) {
      const auto i = order[k];
      const double est = std::abs(es.eigenvectors()(m - 1, i) / es.eigenvalues()(i)) * shifted_norm;
      if (est > 0.5 * tol) estimates_ok = false;
    }
    if (!estimates_ok && !out.values.empty() && !force) return false;

    RitzPairs cand;
    for (std::size_t k = 0; k < take; ++k) {
      const auto i = order[k];
      Vec y(n_, 0.0);
      for (Eigen::Index c = 0; c < m; ++c) axpy(es.eigenvectors()(c, i), Q_[static_cast<std::size_t>(c)], y);
      const double lam = lambda(i);
      cand.values.push_back(lam);
      cand.residuals.push_back(true_residual(A_, M_, y, lam));
      cand.vectors.push_back(std::move(y));
    }
    cand.converged = take == static_cast<std::size_t>(want) &&
                     std::all_of(cand.residuals.begin(), cand.residuals.end(), [&](double r) { return r <= tol; });
    out = std::move(cand);
    return out.converged;
  }

  const CsrMatrix& A_;
  const CsrMatrix& M_;
  const ShiftedFactorization& F_;
  const std::vector<Vec>& locked_;
  std::size_t n_;
  std::vector<Vec> Q_;
  Vec alpha_;
  Vec beta_;
};

// Largest shift at or below `start` for which A - sigma M is positive definite.
std::optional<double> descend_to_definite(ShiftedFactorization& F, double start, double floor) {
  double d = 1e-3 * std::max(1.0, std::abs(start));
  double sigma = start;
  for (int attempt = 0; attempt < 40 && sigma > floor; ++attempt) {
    if (F.factor(sigma) && F.positive_definite()) return sigma;
    sigma = start - d;
    d *= 4.0;
  }
  return std::nullopt;
}

double choose_shift(ShiftedFactorization& F, const CsrMatrix& A, const CsrMatrix& M, const EigenOptions& opts) {
  if (opts.shift) {
    require(F.factor(*opts.shift), "A - sigma M is singular at the requested shift");
    return *opts.shift;
  }
  const double floor = lower_shift_with(F, A, M);
  if (opts.shift_hint) {
    const double start = *opts.shift_hint - 0.05 * std::max(1.0, std::abs(*opts.shift_hint));
    if (auto s = descend_to_definite(F, start, floor)) return *s;
  }
  // Short warm-up at the safe shift gives an upper bound for lambda_1.
  F.factor(floor);
  const std::vector<Vec> none;
  Lanczos warm(A, M, F, none);
  const auto r = warm.run(1, 0.0, opts.seed ^ 0x9e3779b97f4a7c15ULL, 40, false);
  if (r.values.empty()) {
    F.factor(floor);
    return floor;
  }
  const double upper = r.values.front();
  const double gap = 0.05 * std::max(1.0, std::abs(upper));
  if (auto s = descend_to_definite(F, upper - gap, floor)) return *s;
  F.factor(floor);
  return floor;
}

void sort_pairs(EigenResult& r) {
  std::vector<std::size_t> idx(r.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.values[a] < r.values[b]; });
  EigenResult s;
  s.shift_used = r.shift_used;
  s.iterations = r.iterations;
  for (auto i : idx) {
    s.values.push_back(r.values[i]);
    s.vectors.push_back(std::move(r.vectors[i]));
    s.residuals.push_back(r.residuals[i]);
  }
  r = std::move(s);
}

void append(EigenResult& r, RitzPairs&& p) {
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    r.values.push_back(p.values[i]);
    r.vectors.push_back(std::move(p.vectors[i]));
    r.residuals.push_back(p.residuals[i]);
  }
  r.iterations += p.iterations;
}

}  // namespace

double lower_shift(const CsrMatrix& A, const CsrMatrix& M) {
  ShiftedFactorization F(A, M);
  return lower_shift_with(F, A, M);
}

EigenResult smallest_eigenpairs(const CsrMatrix& A, const CsrMatrix& M, const EigenOptions& opts) {
  require(opts.k >= 1, "k must be at least 1");
  require(opts.tol > 0.0, "tolerance must be positive");
  require(opts.k <= A.rows, "k exceeds the problem size");
  ShiftedFactorization F(A, M);
  EigenResult result;
  result.shift_used = choose_shift(F, A, M, opts);
  if (F.sigma() != result.shift_used) F.factor(result.shift_used);

  const int budget = 10 * opts.k + 200;
  constexpr int kRestarts = 8;
  std::uint64_t seed = opts.seed;
  // Unconverged runs keep their converged pairs and restart deflated against them.
  auto pass = [&](int want) {
    for (int restart = 0; want > 0; ++restart) {
      Lanczos lanczos(A, M, F, result.vectors);
      auto p = lanczos.run(want, opts.tol, seed++, budget);
      if (p.values.empty()) throw SolverError("Krylov space exhausted without new eigenpairs", result);
      if (p.converged) {
        append(result, std::move(p));
        sort_pairs(result);
        return;
      }
      RitzPairs kept;
      kept.iterations = p.iterations;
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (p.residuals[i] > opts.tol) continue;
        kept.values.push_back(p.values[i]);
        kept.vectors.push_back(std::move(p.vectors[i]));
        kept.residuals.push_back(p.residuals[i]);
      }
      const auto found = static_cast<int>(kept.values.size());
      if (found == 0 || restart + 1 == kRestarts) {
        append(result, std::move(p));
        sort_pairs(result);
        throw SolverError("Lanczos did not converge within " + std::to_string(restart + 1) + " runs of " +
                              std::to_string(budget) + " iterations",
                          result);
      }
      append(result, std::move(kept));
      sort_pairs(result);
      want -= found;
    }
  };

  pass(opts.k);
  if (opts.verify_multiplicity) {
    ShiftedFactorization probe(A, M);
    for (int round = 0; round < 8; ++round) {
      const double top = result.values[static_cast<std::size_t>(opts.k) - 1];
      double delta = 1e-7 * std::max(1.0, std::abs(top));
      int count = -1;
      for (int tries = 0; tries < 6; ++tries, delta *= 10.0) {
        if (probe.factor(top + delta) && probe.min_abs_pivot() >= 1e-14) {
          count = probe.negative_pivots();
          break;
        }
      }
      require(count >= 0, "inertia probe failed near lambda_" + std::to_string(opts.k));
      const auto below = static_cast<int>(
          std::count_if(result.values.begin(), result.values.end(), [&](double v) { return v < top + delta; }));
      if (count == below) break;
      if (count < below) throw SolverError("inertia reports fewer eigenvalues than were computed", result);
      if (static_cast<int>(result.values.size()) + count - below > A.rows) break;
      pass(count - below);
    }
  }
  result.values.resize(static_cast<std::size_t>(opts.k));
  result.vectors.resize(static_cast<std::size_t>(opts.k));
  result.residuals.resize(static_cast<std::size_t>(opts.k));
  return result;
}

EigenResult smallest_eigenpairs(const CsrMatrix& A, const CsrMatrix& M, int k, double tol) {
  EigenOptions o;
  o.k = k;
  o.tol = tol;
  return smallest_eigenpairs(A, M, o);
}

int inertia_count(const CsrMatrix& A, const CsrMatrix& M, double mu) {
  ShiftedFactorization F(A, M);
  if (!F.factor(mu) || F.min_abs_pivot() < 1e-14) {
    throw SolverError("level " + std::to_string(mu) + " too close to spectrum");
  }
  return F.negative_pivots();
}

}  // namespace surfint
