#include "surfint/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surfint {

namespace {

constexpr const char* kModule = "spectral_analysis";

double first_noncompact(const InterfaceGeometry& g, const std::vector<double>& v) {
  for (std::size_t i = 0; i < g.segments.size(); ++i) {
    if (g.is_noncompact(i)) return v[i];
  }
  return v.front();
}

}  // namespace

ThresholdInfo essential_threshold(const InterfaceGeometry& g, const MaterialData& mat, FormKind kind) {
  mat.validate(g);
  ThresholdInfo t;
  t.kind = kind;
  t.geometry = g.kind;
  if (g.kind == GeometryKind::Circle) {
    t.compact = true;
    t.value = 0.0;
    t.note = "compact support";
    return t;
  }
  if (kind == FormKind::Delta) {
    if (!mat.alpha_constant_on(g, true)) {
      throw DomainError(kModule, "threshold unknown: alpha is not constant on the unbounded part of the support");
    }
    const double a = first_noncompact(g, mat.alpha);
    t.value = a == 0.0 ? 0.0 : -a * a / 4.0;
    t.note = "-alpha^2/4";
    return t;
  }
  if (!mat.beta_constant_on(g, true)) {
    throw DomainError(kModule, "threshold unknown: beta is not constant on the unbounded part of the support");
  }
  const double b = first_noncompact(g, mat.beta);
  t.value = -4.0 / (b * b);
  t.note = "-4/beta^2";
  if (g.kind == GeometryKind::ConeMeridian) {
    t.conjectured = true;
    t.note = "-4/beta^2 (conjectured)";
  }
  return t;
}

int counting(std::span<const double> values, double mu, const ThresholdInfo& threshold, const CsrMatrix& A,
             const CsrMatrix& M) {
  if (!(mu < threshold.value)) {
    throw DomainError(kModule, "counting level " + std::to_string(mu) + " is not below the threshold " +
                                   std::to_string(threshold.value));
  }
  const auto n = static_cast<int>(std::count_if(values.begin(), values.end(), [&](double v) { return v <= mu; }));
  const int inertia = inertia_count(A, M, mu);
  if (n != inertia) {
    throw ConsistencyError(kModule, "counting at mu = " + std::to_string(mu) + " gives " + std::to_string(n) +
                                        " computed eigenvalues but inertia reports " + std::to_string(inertia));
  }
  return n;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Strict: return "strict";
    case Verdict::Indistinguishable: return "indistinguishable";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

bool TheoremAReport::violated() const {
  return std::any_of(pairs.begin(), pairs.end(), [](const PairRecord& p) { return p.verdict == Verdict::Violated; });
}

Verdict TheoremAReport::overall() const {
  if (violated()) return Verdict::Violated;
  if (pairs.empty()) return Verdict::Indistinguishable;
  const bool all_strict =
      std::all_of(pairs.begin(), pairs.end(), [](const PairRecord& p) { return p.verdict == Verdict::Strict; });
  return all_strict ? Verdict::Strict : Verdict::Indistinguishable;
}

TheoremAReport verify_theoremA(std::span<const double> delta, std::span<const double> deltaprime,
                               const ThresholdInfo& th_delta, const ThresholdInfo& th_deltaprime,
                               std::span<const double> err_delta, std::span<const double> err_deltaprime) {
  TheoremAReport r;
  r.threshold_delta = th_delta;
  r.threshold_deltaprime = th_deltaprime;
  const std::size_t n_max = std::min(delta.size(), deltaprime.size());
  if (err_delta.size() < n_max || err_deltaprime.size() < n_max) {
    throw SizeError(kModule, "one error estimate per eigenvalue is required");
  }
  for (std::size_t i = 0; i < n_max && delta[i] < th_deltaprime.value; ++i) {
    PairRecord p;
    p.n = static_cast<int>(i) + 1;
    p.lambda_delta = delta[i];
    p.lambda_deltaprime = deltaprime[i];
    p.gap = delta[i] - deltaprime[i];
    p.error = err_delta[i] + err_deltaprime[i];
    r.pairs.push_back(p);
  }
  // Clustered delta eigenvalues are graded together on their smallest gap.
  for (std::size_t lo = 0; lo < r.pairs.size();) {
    std::size_t hi = lo + 1;
    while (hi < r.pairs.size() && r.pairs[hi].lambda_delta - r.pairs[hi - 1].lambda_delta <= kClusterWidth) ++hi;
    double min_gap = std::numeric_limits<double>::infinity();
    double max_err = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      min_gap = std::min(min_gap, r.pairs[i].gap);
      max_err = std::max(max_err, r.pairs[i].error);
    }
    for (std::size_t i = lo; i < hi; ++i) {
      auto& p = r.pairs[i];
      if (p.gap < -kComparisonSlack) p.verdict = Verdict::Violated;
      else if (min_gap > max_err) p.verdict = Verdict::Strict;
      else p.verdict = Verdict::Indistinguishable;
    }
    lo = hi;
  }
  return r;
}

RichardsonResult richardson(double v_h, double v_h2, double v_h4) {
  const double d1 = v_h - v_h2;
  const double d2 = v_h2 - v_h4;
  RichardsonResult r;
  const double ratio = d2 != 0.0 ? d1 / d2 : 0.0;
  if (d1 == 0.0 || d2 == 0.0 || !(ratio > 1.0)) {
    r.order = std::numeric_limits<double>::quiet_NaN();
    r.limit = v_h4;
    r.error = std::abs(v_h - v_h4);
    return r;
  }
  r.order = std::log2(ratio);
  r.limit = v_h4 + (v_h4 - v_h2) / (ratio - 1.0);
  r.error = std::abs(v_h4 - r.limit);
  return r;
}

TruncationStudy summarize_truncation(std::vector<double> box_halfwidths, std::vector<std::vector<double>> values,
                                     double stabilization_tol, double below) {
  if (box_halfwidths.size() != values.size() || box_halfwidths.empty()) {
    throw SizeError(kModule, "one eigenvalue list per box is required");
  }
  TruncationStudy t;
  t.box_halfwidths = std::move(box_halfwidths);
  t.values = std::move(values);
  const auto& last = t.values.back();
  t.delta.assign(last.size(), 0.0);
  if (t.values.size() >= 2) {
    const auto& prev = t.values[t.values.size() - 2];
    for (std::size_t n = 0; n < last.size() && n < prev.size(); ++n) t.delta[n] = std::abs(last[n] - prev[n]);
  }
  for (std::size_t b = 1; b < t.values.size(); ++b) {
    for (std::size_t n = 0; n < t.values[b].size() && n < t.values[b - 1].size(); ++n) {
      if (t.values[b][n] > t.values[b - 1][n] + kComparisonSlack) t.monotone = false;
    }
  }
  t.stabilized = t.values.size() >= 2;
  for (std::size_t n = 0; n < last.size(); ++n) {
    if (last[n] < below && t.delta[n] > stabilization_tol) t.stabilized = false;
  }
  return t;
}

void StudyConfig::validate() const {
  material.validate(geometry);
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw DomainError(kModule, what);
  };
  require(levels >= 3, "at least three refinement levels are needed for the error estimate");
  require(levels <= 6, "at most six refinement levels are supported");
  require(box_halfwidths.size() >= 3, "truncation study needs at least three box sizes");
  require(std::is_sorted(box_halfwidths.begin(), box_halfwidths.end()) &&
              std::adjacent_find(box_halfwidths.begin(), box_halfwidths.end()) == box_halfwidths.end(),
          "box sizes must be strictly increasing");
  require(std::abs(box_halfwidths.back() - geometry.box_halfwidth) <= 1e-12 * geometry.box_halfwidth,
          "largest box must equal the geometry box");
  require(k >= 1, "k must be at least 1");
  require(tol > 0.0, "solver tolerance must be positive");
  require(stabilization_tol > 0.0, "stabilization tolerance must be positive");
  require(h > 0.0 && std::isfinite(h), "mesh size h must be positive");
  require(min_angle_deg > 0.0 && min_angle_deg <= 30.0, "minimum angle must lie in (0, 30] degrees");
}

namespace {

struct Solved {
  EigenResult delta;
  EigenResult deltaprime;
};

class Solver {
 public:
  explicit Solver(const StudyConfig& c) : c_(c) {
    opts_.weight = c.geometry.radial_weight ? Weight::Radial : Weight::None;
  }

  AssembledForms assemble_at(const Mesh& m, double L) const {
    return assemble(m, build_dofs(m, DofKind::Continuous, L), build_dofs(m, DofKind::Broken, L), c_.material, opts_);
  }

  Solved solve(const AssembledForms& F, std::optional<double> hint_delta, std::optional<double> hint_deltaprime) const {
    EigenOptions o;
    o.k = c_.k;
    o.tol = c_.tol;
    o.seed = c_.seed;
    Solved s;
    o.shift_hint = hint_delta;
    s.delta = smallest_eigenpairs(F.A_delta(), F.M_cont, o);
    o.shift_hint = hint_deltaprime;
    s.deltaprime = smallest_eigenpairs(F.A_deltaprime(), F.M_brok, o);
    return s;
  }

 private:
  const StudyConfig& c_;
  AssembleOptions opts_;
};

void track_comparison(StudyResult& r, const Solved& s) {
  if (!r.comparison_applicable) return;
  for (std::size_t n = 0; n < s.delta.values.size() && n < s.deltaprime.values.size(); ++n) {
    const double excess = s.deltaprime.values[n] - s.delta.values[n];
    r.worst_excess = std::max(r.worst_excess, excess);
    if (excess > kComparisonSlack) r.comparison_holds = false;
  }
}

}  // namespace

StudyResult run_study(const StudyConfig& c) {
  c.validate();
  StudyResult r;
  r.threshold_delta = essential_threshold(c.geometry, c.material, FormKind::Delta);
  r.threshold_deltaprime = essential_threshold(c.geometry, c.material, FormKind::DeltaPrime);
  r.comparison_applicable = c.material.below_borderline();

  TriangulateOptions topts;
  topts.h_target = c.h;
  topts.min_angle_deg = c.min_angle_deg;
  topts.nested_halfwidths.assign(c.box_halfwidths.begin(), c.box_halfwidths.end() - 1);
  Mesh mesh = triangulate(c.geometry, topts);
  const Solver solver(c);
  const double L = c.box_halfwidths.back();

  std::optional<double> hint_d, hint_dp;
  std::optional<AssembledForms> finest;
  for (int level = 0; level < c.levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh, c.snap_to_circle ? &c.geometry : nullptr);
    auto F = solver.assemble_at(mesh, L);
    const Solved s = solver.solve(F, hint_d, hint_dp);
    track_comparison(r, s);
    r.level_h.push_back(c.h / std::pow(2.0, level));
    r.levels_delta.push_back(s.delta.values);
    r.levels_deltaprime.push_back(s.deltaprime.values);
    hint_d = s.delta.values.front();
    hint_dp = s.deltaprime.values.front();
    if (level + 1 == c.levels) finest = std::move(F);
  }
  r.nodes = mesh.nodes.size();
  r.finest_mesh = mesh;
  r.dofs_continuous = finest->cont.size();
  r.dofs_broken = finest->broken.size();

  std::vector<std::vector<double>> box_d, box_dp;
  for (std::size_t b = 0; b + 1 < c.box_halfwidths.size(); ++b) {
    const Solved s = solver.solve(solver.assemble_at(mesh, c.box_halfwidths[b]), hint_d, hint_dp);
    track_comparison(r, s);
    box_d.push_back(s.delta.values);
    box_dp.push_back(s.deltaprime.values);
  }
  box_d.push_back(r.levels_delta.back());
  box_dp.push_back(r.levels_deltaprime.back());
  r.truncation_delta = summarize_truncation(c.box_halfwidths, std::move(box_d), c.stabilization_tol,
                                            r.threshold_deltaprime.value);
  r.truncation_deltaprime = summarize_truncation(c.box_halfwidths, std::move(box_dp), c.stabilization_tol,
                                                 r.threshold_deltaprime.value);

  const auto nl = r.levels_delta.size();
  for (int n = 0; n < c.k; ++n) {
    const auto i = static_cast<std::size_t>(n);
    r.richardson_delta.push_back(
        richardson(r.levels_delta[nl - 3][i], r.levels_delta[nl - 2][i], r.levels_delta[nl - 1][i]));
    r.richardson_deltaprime.push_back(
        richardson(r.levels_deltaprime[nl - 3][i], r.levels_deltaprime[nl - 2][i], r.levels_deltaprime[nl - 1][i]));
    r.error_delta.push_back(r.richardson_delta[i].error + r.truncation_delta.delta[i] + 10.0 * c.tol);
    r.error_deltaprime.push_back(r.richardson_deltaprime[i].error + r.truncation_deltaprime.delta[i] + 10.0 * c.tol);
  }
  r.theorem = verify_theoremA(r.levels_delta.back(), r.levels_deltaprime.back(), r.threshold_delta,
                              r.threshold_deltaprime, r.error_delta, r.error_deltaprime);

  // Probe levels between consecutive distinct computed eigenvalues, kept below both
  // thresholds and below the largest computed value of each operator.
  const auto& vd = r.levels_delta.back();
  const auto& vdp = r.levels_deltaprime.back();
  const double ceiling = std::min({r.threshold_delta.value, r.threshold_deltaprime.value, vd.back(), vdp.back()});
  std::vector<double> all(vd.begin(), vd.end());
  all.insert(all.end(), vdp.begin(), vdp.end());
  std::sort(all.begin(), all.end());
  const CsrMatrix Ad = finest->A_delta();
  const CsrMatrix Adp = finest->A_deltaprime();
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    if (all[i + 1] - all[i] <= kClusterWidth) continue;
    const double mu = 0.5 * (all[i] + all[i + 1]);
    if (!(mu < ceiling)) break;
    CountingPoint p;
    p.mu = mu;
    p.n_delta = counting(vd, mu, r.threshold_delta, Ad, finest->M_cont);
    p.n_deltaprime = counting(vdp, mu, r.threshold_deltaprime, Adp, finest->M_brok);
    r.counting.push_back(p);
  }
  return r;
}

}  // namespace surfint
