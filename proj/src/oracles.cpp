#include "surfint/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "surfint/common.hpp"

namespace surfint {

namespace {

constexpr const char* kModule = "oracles";

// Symmetric tridiagonal pencil (stiffness, diagonal mass), reduced to a standard
// tridiagonal matrix and searched by Sturm-count bisection.
class Tridiagonal {
 public:
  void push(double stiffness_diag, double mass) {
    diag_.push_back(stiffness_diag);
    mass_.push_back(mass);
  }
  // Coupling between the last two pushed unknowns.
  void couple_last(double stiffness_off) { off_.push_back(stiffness_off); }
  void add_to_diag(std::size_t i, double v) { diag_[i] += v; }
  std::size_t size() const { return diag_.size(); }

  std::vector<double> eigenvalues_below(double level) const {
    scale();
    const int n_below = count_below(level);
    std::vector<double> out;
    double lo = lower_bound();
    for (int k = 1; k <= n_below; ++k) {
      double a = lo, b = level;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (count_below(mid) >= k) b = mid;
        else a = mid;
      }
      out.push_back(0.5 * (a + b));
      lo = a;
    }
    return out;
  }

 private:
  void scale() const {
    const std::size_t n = diag_.size();
    d_.resize(n);
    e2_.assign(n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) d_[i] = static_cast<long double>(diag_[i]) / mass_[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const long double e = static_cast<long double>(off_[i]) / std::sqrt(static_cast<long double>(mass_[i]) * mass_[i + 1]);
      e2_[i] = e * e;
    }
  }

  int count_below(double x) const {
    int neg = 0;
    long double q = 1.0L;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      q = d_[i] - x - (i > 0 ? e2_[i - 1] / q : 0.0L);
      if (q == 0.0L) q = -1e-300L;
      if (q < 0.0L) ++neg;
    }
    return neg;
  }

  double lower_bound() const {
    long double lo = 0.0L;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      const long double r = (i > 0 ? std::sqrt(e2_[i - 1]) : 0.0L) + (i + 1 < d_.size() ? std::sqrt(e2_[i]) : 0.0L);
      lo = std::min(lo, d_[i] - r);
    }
    return static_cast<double>(lo) - 1.0;
  }

  std::vector<double> diag_, mass_, off_;
  mutable std::vector<long double> d_, e2_;
};

// Richardson over h and h/2 for an O(h^2) discretization; pairs from the bottom.
std::vector<double> extrapolate(const std::vector<double>& coarse, const std::vector<double>& fine) {
  const std::size_t n = std::min(coarse.size(), fine.size());
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (4.0 * fine[i] - coarse[i]) / 3.0;
    if (v < 0.0) out.push_back(v);
  }
  return out;
}

using Builder = std::function<Tridiagonal(double h, double extent)>;

// Solves at h (and h/2), growing the domain until every reported state decays
// over `decay_lengths` before the truncation.
OracleResult adaptive(const Builder& build, double h, double interface_pos, double kappa_guess,
                      const OracleOptions& opts, const char* method) {
  double extent = interface_pos + opts.decay_lengths / kappa_guess;
  OracleResult r;
  r.method = method;
  for (int round = 0; round < 6; ++round) {
    const double cells = std::ceil(extent / h);
    if (cells > 4e6) throw DomainError(kModule, "state too weakly bound for the oracle grid");
    extent = cells * h;
    const auto coarse = build(h, extent).eigenvalues_below(0.0);
    std::vector<double> values = coarse;
    if (opts.extrapolate) values = extrapolate(coarse, build(0.5 * h, extent).eigenvalues_below(0.0));
    r.eigenvalues = values;
    r.step = opts.extrapolate ? 0.5 * h : h;
    r.extent = extent;
    if (values.empty()) return r;
    const double needed = interface_pos + opts.decay_lengths / std::sqrt(-values.back());
    if (needed <= extent * (1.0 + 1e-12)) return r;
    extent = needed * 1.05;
  }
  return r;
}

double auto_step(const OracleOptions& opts, double kappa, double length_scale) {
  if (opts.step > 0.0) return opts.step;
  return std::min(2e-3 / kappa, length_scale / 500.0);
}

// Radial grid step with R on a node.
double radial_step(const OracleOptions& opts, double R, double kappa) {
  const double h = auto_step(opts, kappa, R);
  return R / std::ceil(R / h);
}

void check_radial(double R, double strength, int m_max, const char* name) {
  if (!(std::isfinite(R) && R > 0.0)) throw DomainError(kModule, "radius must be positive");
  if (!(std::isfinite(strength) && strength > 0.0)) {
    throw DomainError(kModule, std::string(name) + " must be positive");
  }
  if (m_max < 0) throw DomainError(kModule, "m_max must be non-negative");
}

// Radial cell stiffness r_{j+1/2} / h between nodes j and j+1, plus mode and mass terms.
struct RadialGrid {
  double h;
  int m;
  double r(double j) const { return j * h; }
  double mass(int j) const { return j == 0 ? h * h / 8.0 : r(j) * h; }
  double centrifugal(int j) const { return j == 0 ? 0.0 : m * m * h / r(j); }
};

Tridiagonal radial_delta(double h, double extent, double R, double alpha, int m) {
  const RadialGrid g{h, m};
  const int N = static_cast<int>(std::lround(extent / h));
  const int jR = static_cast<int>(std::lround(R / h));
  Tridiagonal t;
  for (int j = m == 0 ? 0 : 1; j < N; ++j) {
    double d = g.r(j + 0.5) / h + (j > 0 ? g.r(j - 0.5) / h : 0.0) + g.centrifugal(j);
    if (j == jR) d -= alpha * R;
    t.push(d, g.mass(j));
    if (t.size() > 1) t.couple_last(-g.r(j - 0.5) / h);
  }
  return t;
}

Tridiagonal radial_deltaprime(double h, double extent, double R, double beta, int m) {
  const RadialGrid g{h, m};
  const int N = static_cast<int>(std::lround(extent / h));
  const int jR = static_cast<int>(std::lround(R / h));
  const double mR = m * m / (R * R);
  Tridiagonal t;
  for (int j = m == 0 ? 0 : 1; j < N; ++j) {
    if (j == jR) {
      const double w_in = R * h / 2 - h * h / 8;
      const double w_out = R * h / 2 + h * h / 8;
      t.push(g.r(j - 0.5) / h + mR * w_in - R / beta, w_in);
      if (t.size() > 1) t.couple_last(-g.r(j - 0.5) / h);
      t.push(g.r(j + 0.5) / h + mR * w_out - R / beta, w_out);
      t.couple_last(R / beta);
      continue;
    }
    t.push(g.r(j + 0.5) / h + (j > 0 ? g.r(j - 0.5) / h : 0.0) + g.centrifugal(j), g.mass(j));
    if (t.size() > 1) t.couple_last(-g.r(j - 0.5) / h);
  }
  return t;
}

// First sign change on a uniform scan, refined by bisection.
std::optional<double> bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  const int samples = 400;
  double prev = lo;
  for (int s = 1; s <= samples; ++s) {
    const double x = lo + (hi - lo) * s / samples;
    const double fx = f(x);
    if (std::signbit(fx) != std::signbit(flo)) {
      double a = prev, b = x;
      double fa = flo;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    prev = x;
    flo = fx;
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> RadialSpectrum::with_multiplicity() const {
  std::vector<double> all;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (double v : modes[m].eigenvalues) {
      all.push_back(v);
      if (m > 0) all.push_back(v);
    }
  }
  std::sort(all.begin(), all.end());
  return all;
}

OracleResult point_delta_1d(double alpha, const OracleOptions& opts) {
  if (!(alpha > 0.0)) return {{}, "fd-bisection", 0.0, 0.0};
  const double kappa = alpha / 2.0;
  auto build = [alpha](double h, double a) {
    const int N = static_cast<int>(std::lround(a / h));
    Tridiagonal t;
    for (int j = -N + 1; j < N; ++j) {
      t.push(2.0 / h - (j == 0 ? alpha : 0.0), h);
      if (t.size() > 1) t.couple_last(-1.0 / h);
    }
    return t;
  };
  return adaptive(build, auto_step(opts, kappa, 1.0 / kappa), 0.0, kappa, opts, "fd-bisection");
}

OracleResult point_deltaprime_1d(double beta, const OracleOptions& opts) {
  if (!(beta > 0.0)) return {{}, "fd-bisection", 0.0, 0.0};
  const double kappa = 2.0 / beta;
  auto build = [beta](double h, double a) {
    const int N = static_cast<int>(std::lround(a / h));
    Tridiagonal t;
    for (int j = -N + 1; j < 0; ++j) {
      t.push(2.0 / h, h);
      if (t.size() > 1) t.couple_last(-1.0 / h);
    }
    t.push(1.0 / h - 1.0 / beta, h / 2);
    if (t.size() > 1) t.couple_last(-1.0 / h);
    t.push(1.0 / h - 1.0 / beta, h / 2);
    t.couple_last(1.0 / beta);
    for (int j = 1; j < N; ++j) {
      t.push(2.0 / h, h);
      t.couple_last(-1.0 / h);
    }
    return t;
  };
  return adaptive(build, auto_step(opts, kappa, 1.0 / kappa), 0.0, kappa, opts, "fd-bisection");
}

RadialSpectrum circle_delta_radial(double R, double alpha, int m_max, const OracleOptions& opts) {
  check_radial(R, alpha, m_max, "alpha");
  const double kappa = std::max(alpha / 2.0, 1.0 / R);
  const double h = radial_step(opts, R, kappa);
  RadialSpectrum s;
  for (int m = 0; m <= m_max; ++m) {
    auto build = [=](double hh, double ext) { return radial_delta(hh, ext, R, alpha, m); };
    s.modes.push_back(adaptive(build, h, R, kappa, opts, "fd-bisection"));
  }
  return s;
}

RadialSpectrum circle_deltaprime_radial(double R, double beta, int m_max, const OracleOptions& opts) {
  check_radial(R, beta, m_max, "beta");
  const double kappa = std::max(2.0 / beta, 1.0 / R);
  const double h = radial_step(opts, R, kappa);
  RadialSpectrum s;
  for (int m = 0; m <= m_max; ++m) {
    auto build = [=](double hh, double ext) { return radial_deltaprime(hh, ext, R, beta, m); };
    s.modes.push_back(adaptive(build, h, R, kappa, opts, "fd-bisection"));
  }
  return s;
}

RadialSpectrum circle_delta_bessel(double R, double alpha, int m_max) {
  check_radial(R, alpha, m_max, "alpha");
  RadialSpectrum s;
  for (int m = 0; m <= m_max; ++m) {
    const double nu = m;
    // kappa (I_{m+1}/I_m + K_{m+1}/K_m)(kappa R) = alpha
    auto f = [&](double k) {
      const double x = k * R;
      return k * (std::cyl_bessel_i(nu + 1, x) / std::cyl_bessel_i(nu, x) +
                  std::cyl_bessel_k(nu + 1, x) / std::cyl_bessel_k(nu, x)) -
             alpha;
    };
    OracleResult r{{}, "bessel", 0.0, 0.0};
    if (auto k = bisect_root(f, 1e-6 / R, alpha + 2.0 * (m + 1) / R)) r.eigenvalues.push_back(-(*k) * (*k));
    s.modes.push_back(r);
  }
  return s;
}

RadialSpectrum circle_deltaprime_bessel(double R, double beta, int m_max) {
  check_radial(R, beta, m_max, "beta");
  RadialSpectrum s;
  for (int m = 0; m <= m_max; ++m) {
    const double nu = m;
    // I_m/I_m' - K_m/K_m' = beta kappa at x = kappa R
    auto f = [&](double k) {
      const double x = k * R;
      const double i = std::cyl_bessel_i(nu, x);
      const double kk = std::cyl_bessel_k(nu, x);
      const double di = std::cyl_bessel_i(nu + 1, x) + nu / x * i;
      const double dk = -std::cyl_bessel_k(nu + 1, x) + nu / x * kk;
      return i / di - kk / dk - beta * k;
    };
    OracleResult r{{}, "bessel", 0.0, 0.0};
    if (auto k = bisect_root(f, 1e-6 / R, 4.0 / beta + 2.0 * (m + 1) / R)) r.eigenvalues.push_back(-(*k) * (*k));
    s.modes.push_back(r);
  }
  return s;
}

}  // namespace surfint
