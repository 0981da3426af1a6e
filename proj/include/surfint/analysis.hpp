#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfint/eigensolver.hpp"
#include "surfint/forms.hpp"
#include "surfint/geometry.hpp"

namespace surfint {

struct ThresholdInfo {
  FormKind kind = FormKind::Delta;
  GeometryKind geometry = GeometryKind::Circle;
  double value = 0.0;          // inf of the essential spectrum
  bool compact = false;        // value is zero because the support is compact
  bool conjectured = false;
  std::string note;
};

// Throws DomainError when the strength is not constant on the non-compact part.
ThresholdInfo essential_threshold(const InterfaceGeometry& g, const MaterialData& mat, FormKind kind);

// Number of computed eigenvalues <= mu, checked against the inertia of A - mu M.
int counting(std::span<const double> values, double mu, const ThresholdInfo& threshold, const CsrMatrix& A,
             const CsrMatrix& M);

enum class Verdict { Strict, Indistinguishable, Violated };
const char* to_string(Verdict v);

struct PairRecord {
  int n = 0;
  double lambda_delta = 0.0;
  double lambda_deltaprime = 0.0;
  double gap = 0.0;     // lambda_delta - lambda_deltaprime
  double error = 0.0;   // combined error budget of both eigenvalues
  Verdict verdict = Verdict::Indistinguishable;
};

struct TheoremAReport {
  ThresholdInfo threshold_delta;
  ThresholdInfo threshold_deltaprime;
  std::vector<PairRecord> pairs;

  bool violated() const;
  // Strict only if there is at least one pair and every pair is strict.
  Verdict overall() const;
};

inline constexpr double kComparisonSlack = 1e-9;
inline constexpr double kClusterWidth = 1e-8;

// Pairs every n with lambda_n(delta) below the delta' threshold and grades the gap
// against the per-eigenvalue error budgets.
TheoremAReport verify_theoremA(std::span<const double> delta, std::span<const double> deltaprime,
                               const ThresholdInfo& th_delta, const ThresholdInfo& th_deltaprime,
                               std::span<const double> err_delta, std::span<const double> err_deltaprime);

struct RichardsonResult {
  double limit = 0.0;
  double order = 0.0;   // NaN when the triple is not monotonically convergent
  double error = 0.0;
};

// Values at h, h/2, h/4.
RichardsonResult richardson(double v_h, double v_h2, double v_h4);

struct TruncationStudy {
  std::vector<double> box_halfwidths;
  std::vector<std::vector<double>> values;   // per box, ascending eigenvalues
  std::vector<double> delta;                 // per n: change between the two largest boxes
  bool stabilized = false;
  bool monotone = true;                      // non-increasing in the box size within 1e-9
};

// Stabilization is judged on the eigenvalues below `below` in the largest box.
TruncationStudy summarize_truncation(std::vector<double> box_halfwidths, std::vector<std::vector<double>> values,
                                     double stabilization_tol, double below);

struct StudyConfig {
  InterfaceGeometry geometry;               // built at the largest box
  MaterialData material;
  double h = 0.5;
  int levels = 3;                           // nested meshes h, h/2, h/4, ...
  std::vector<double> box_halfwidths;       // ascending, last equals the geometry box
  bool snap_to_circle = false;
  int k = 3;
  double tol = 1e-9;
  std::uint64_t seed = 0x5eed;
  double stabilization_tol = 1e-3;
  double min_angle_deg = 20.0;

  void validate() const;
};

struct CountingPoint {
  double mu = 0.0;
  int n_delta = 0;
  int n_deltaprime = 0;
};

struct StudyResult {
  ThresholdInfo threshold_delta;
  ThresholdInfo threshold_deltaprime;
  std::vector<double> level_h;
  std::vector<std::vector<double>> levels_delta;        // per level, largest box
  std::vector<std::vector<double>> levels_deltaprime;
  std::vector<RichardsonResult> richardson_delta;       // per n
  std::vector<RichardsonResult> richardson_deltaprime;
  TruncationStudy truncation_delta;                     // finest level
  TruncationStudy truncation_deltaprime;
  std::vector<double> error_delta;                      // per n error budget
  std::vector<double> error_deltaprime;
  TheoremAReport theorem;
  std::vector<CountingPoint> counting;
  // lambda_n(delta') <= lambda_n(delta) + slack over every computed n, level and box.
  bool comparison_applicable = false;
  bool comparison_holds = true;
  double worst_excess = -1e300;   // max of lambda_n(delta') - lambda_n(delta)
  Mesh finest_mesh;
  std::size_t nodes = 0;
  std::size_t dofs_continuous = 0;
  std::size_t dofs_broken = 0;
};

StudyResult run_study(const StudyConfig& config);

}  // namespace surfint
