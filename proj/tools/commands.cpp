#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "surfint/oracles.hpp"
#include "surfint/report.hpp"
#include "surfint/svg.hpp"

namespace spec {

using namespace surfint;
namespace fs = std::filesystem;

namespace {

std::string fmt(double x, int digits = 10) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

const StudyConfig& require_study(const RunConfig& rc, const char* command) {
  if (!rc.study) throw ConfigError(std::string(command) + " needs geometry, material and discretization blocks");
  return *rc.study;
}

fs::path output_dir(const RunConfig& rc, const CommandOptions& opts) {
  const fs::path dir = opts.out ? *opts.out : rc.outputs.directory;
  fs::create_directories(dir);
  return dir;
}

std::string dump_report(const StudyConfig& c, const StudyResult& r) {
  auto j = report_json(c, r);
  j["timestamp"] = utc_timestamp();
  return j.dump(2) + "\n";
}

Plot spectrum_plot(const StudyResult& r) {
  Plot p{"Smallest eigenvalues on the finest mesh", "n", "eigenvalue", {}, {}};
  Series d{"delta", {}, r.levels_delta.back()};
  Series dp{"delta'", {}, r.levels_deltaprime.back()};
  for (std::size_t i = 0; i < d.y.size(); ++i) d.x.push_back(static_cast<double>(i + 1));
  for (std::size_t i = 0; i < dp.y.size(); ++i) dp.x.push_back(static_cast<double>(i + 1));
  p.series = {d, dp};
  p.reference_lines = {r.threshold_delta.value};
  if (r.threshold_deltaprime.value != r.threshold_delta.value) p.reference_lines.push_back(r.threshold_deltaprime.value);
  return p;
}

Plot convergence_plot(const StudyResult& r) {
  Plot p{"Eigenvalues under refinement", "h^2", "eigenvalue", {}, {}};
  auto add = [&](const std::vector<std::vector<double>>& levels, const char* name) {
    for (std::size_t n = 0; n < levels.front().size(); ++n) {
      Series s{std::string(name) + " n=" + std::to_string(n + 1), {}, {}};
      for (std::size_t l = 0; l < levels.size(); ++l) {
        s.x.push_back(r.level_h[l] * r.level_h[l]);
        s.y.push_back(levels[l][n]);
      }
      p.series.push_back(std::move(s));
    }
  };
  add(r.levels_delta, "delta");
  add(r.levels_deltaprime, "delta'");
  return p;
}

void write_outputs(const RunConfig& rc, const StudyResult& r, const fs::path& dir, bool convergence) {
  const auto& c = *rc.study;
  if (rc.outputs.json) write_file_atomic(dir / "report.json", dump_report(c, r));
  if (rc.outputs.csv) {
    write_file_atomic(dir / "report.csv", report_csv(r));
    if (convergence) write_file_atomic(dir / "convergence.csv", convergence_csv(r));
  }
  if (rc.outputs.svg) {
    write_file_atomic(dir / "spectrum.svg", render_svg(spectrum_plot(r)));
    if (convergence) write_file_atomic(dir / "convergence.svg", render_svg(convergence_plot(r)));
  }
  if (rc.outputs.mesh) {
    std::ostringstream os;
    write_mesh(os, r.finest_mesh);
    write_file_atomic(dir / "mesh.txt", os.str());
  }
  if (rc.outputs.matrices) {
    AssembleOptions ao;
    ao.weight = c.geometry.radial_weight ? Weight::Radial : Weight::None;
    const auto F = assemble(r.finest_mesh, build_dofs(r.finest_mesh, DofKind::Continuous),
                            build_dofs(r.finest_mesh, DofKind::Broken), c.material, ao);
    auto put = [&](const char* name, const CsrMatrix& m) {
      std::ostringstream os;
      write_matrix_market(os, m);
      write_file_atomic(dir / name, os.str());
    };
    put("A_delta.mtx", F.A_delta());
    put("M_delta.mtx", F.M_cont);
    put("A_deltaprime.mtx", F.A_deltaprime());
    put("M_deltaprime.mtx", F.M_brok);
  }
}

void print_pairs(const StudyResult& r, std::ostream& log) {
  log << "thresholds: delta " << fmt(r.threshold_delta.value) << " (" << r.threshold_delta.note << "), delta' "
      << fmt(r.threshold_deltaprime.value) << " (" << r.threshold_deltaprime.note << ")\n";
  log << "  n  lambda_delta      lambda_delta'     gap           error         verdict\n";
  for (const auto& p : r.theorem.pairs) {
    char line[160];
    std::snprintf(line, sizeof line, "%3d  %-16.10g  %-16.10g  %-12.4e  %-12.4e  %s\n", p.n, p.lambda_delta,
                  p.lambda_deltaprime, p.gap, p.error, to_string(p.verdict));
    log << line;
  }
  if (r.theorem.pairs.empty()) log << "  (no eigenvalue below the delta' threshold)\n";
  if (r.comparison_applicable) {
    log << "discrete comparison " << (r.comparison_holds ? "holds" : "VIOLATED") << ", worst excess "
        << fmt(r.worst_excess, 4) << "\n";
  }
  if (!r.truncation_delta.stabilized || !r.truncation_deltaprime.stabilized) {
    log << "warning: truncation not stabilized within the configured tolerance\n";
  }
}

}  // namespace

int exit_code(const StudyResult& r) {
  if (r.theorem.violated() || !r.comparison_holds) return kExitViolated;
  if (r.theorem.pairs.empty()) return kExitIndistinguishable;
  return r.theorem.overall() == Verdict::Strict ? kExitStrict : kExitIndistinguishable;
}

int cmd_solve(const RunConfig& rc, const CommandOptions& opts, std::ostream& log) {
  const auto& c = require_study(rc, "solve");
  const auto r = run_study(c);
  write_outputs(rc, r, output_dir(rc, opts), false);
  print_pairs(r, log);
  const int code = exit_code(r);
  log << "verdict: " << (code == kExitViolated ? "violated" : to_string(r.theorem.overall())) << "\n";
  return code;
}

int cmd_converge(const RunConfig& rc, const CommandOptions& opts, std::ostream& log) {
  const auto& c = require_study(rc, "converge");
  const auto r = run_study(c);
  write_outputs(rc, r, output_dir(rc, opts), true);
  log << "  n  order_delta  limit_delta       order_delta'  limit_delta'\n";
  for (std::size_t i = 0; i < r.richardson_delta.size(); ++i) {
    const auto& d = r.richardson_delta[i];
    const auto& dp = r.richardson_deltaprime[i];
    char line[160];
    std::snprintf(line, sizeof line, "%3zu  %-11s  %-16.10g  %-12s  %-16.10g%s\n", i + 1, fmt(d.order, 4).c_str(),
                  d.limit, fmt(dp.order, 4).c_str(), dp.limit,
                  std::isnan(d.order) || std::isnan(dp.order) ? "  non-monotone" : "");
    log << line;
  }
  return r.theorem.violated() || !r.comparison_holds ? kExitViolated : kExitStrict;
}

int cmd_sweep(const RunConfig& rc, const CommandOptions& opts, std::ostream& log) {
  require_study(rc, "sweep");
  if (!rc.sweep) throw ConfigError("sweep needs a sweep block");
  const auto& sw = *rc.sweep;
  const auto seed = seed_from_environment();

  struct Point {
    double value = 0.0;
    std::optional<StudyResult> result;
    std::optional<StudyConfig> config;
    std::string error;
  };
  std::vector<Point> points(sw.values.size());
  for (std::size_t i = 0; i < points.size(); ++i) points[i].value = sw.values[i];

  const fs::path dir = output_dir(rc, opts);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& p = points[i];
      try {
        auto prc = parse_config(with_parameter(rc.source, sw.parameter, p.value));
        if (seed) prc.study->seed = *seed;
        p.result = run_study(*prc.study);
        p.config = *prc.study;
        if (rc.outputs.json) {
          write_file_atomic(dir / ("point_" + std::to_string(i) + ".json"), dump_report(*p.config, *p.result));
        }
      } catch (const std::exception& e) {
        p.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      log << to_string(sw.parameter) << " = " << fmt(p.value) << ": "
          << (p.result ? to_string(p.result->theorem.overall()) : ("failed: " + p.error)) << "\n";
    }
  };
  const int jobs = std::clamp(opts.jobs, 1, static_cast<int>(points.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  std::ostringstream csv;
  csv << to_string(sw.parameter) << ",status,verdict,pairs,lambda1_delta,lambda1_deltaprime,gap1,error1,message\n";
  Series d{"lambda_1 delta", {}, {}}, dp{"lambda_1 delta'", {}, {}}, gap{"gap n=1", {}, {}}, err{"error n=1", {}, {}};
  int code = kExitStrict;
  bool failed = false;
  for (const auto& p : points) {
    csv << fmt(p.value, 12) << ',';
    if (!p.result) {
      failed = true;
      std::string msg = p.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      csv << "failed,,,,,,,\"" << msg << "\"\n";
      continue;
    }
    const auto& r = *p.result;
    code = std::max(code, exit_code(r));
    const double l1d = r.levels_delta.back().front();
    const double l1dp = r.levels_deltaprime.back().front();
    const bool paired = !r.theorem.pairs.empty();
    const double g = paired ? r.theorem.pairs.front().gap : l1d - l1dp;
    const double e = r.error_delta.front() + r.error_deltaprime.front();
    csv << "ok," << (exit_code(r) == kExitViolated ? "violated" : to_string(r.theorem.overall())) << ','
        << r.theorem.pairs.size() << ',' << fmt(round_significant(l1d), 12) << ',' << fmt(round_significant(l1dp), 12)
        << ',' << fmt(round_significant(g), 12) << ',' << fmt(round_significant(e), 12) << ",\n";
    d.x.push_back(p.value);
    d.y.push_back(l1d);
    dp.x.push_back(p.value);
    dp.y.push_back(l1dp);
    gap.x.push_back(p.value);
    gap.y.push_back(g);
    err.x.push_back(p.value);
    err.y.push_back(e);
  }
  if (rc.outputs.csv) write_file_atomic(dir / "sweep.csv", csv.str());
  if (rc.outputs.svg) {
    write_file_atomic(dir / "sweep_eigenvalues.svg",
                      render_svg({"Lowest eigenvalue", to_string(sw.parameter), "lambda_1", {d, dp}, {}}));
    write_file_atomic(dir / "sweep_gap.svg",
                      render_svg({"Gap lambda_1(delta) - lambda_1(delta')", to_string(sw.parameter), "gap",
                                  {gap, err}, {0.0}}));
  }
  return failed ? kExitError : code;
}

int cmd_oracle(const RunConfig& rc, const CommandOptions& opts, std::ostream& log) {
  if (!rc.oracle) throw ConfigError("oracle needs an oracle block");
  const auto& o = *rc.oracle;
  std::ostringstream csv;
  csv << "model,parameter,m,computed,reference,difference\n";
  auto row = [&](const std::string& model, double param, int m, double computed, double reference) {
    csv << model << ',' << fmt(param, 12) << ',' << m << ',' << fmt(computed, 12) << ',' << fmt(reference, 12) << ','
        << fmt(computed - reference, 4) << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %-10.6g %3d  %-18.12g %-18.12g %.3e\n", model.c_str(), param, m,
                  computed, reference, computed - reference);
    log << line;
  };
  log << "model                    parameter    m  computed           reference          difference\n";
  for (double a : o.alpha) row("point_delta_1d", a, 0, point_delta_1d(a).eigenvalues.at(0), delta_1d_closed_form(a));
  for (double b : o.beta) {
    row("point_deltaprime_1d", b, 0, point_deltaprime_1d(b).eigenvalues.at(0), deltaprime_1d_closed_form(b));
  }
  if (o.circle) {
    const auto& c = *o.circle;
    auto modes = [&](const std::string& name, double param, const RadialSpectrum& fem, const RadialSpectrum& bessel) {
      for (std::size_t m = 0; m < fem.modes.size(); ++m) {
        const auto& fv = fem.modes[m].eigenvalues;
        const auto& bv = bessel.modes[m].eigenvalues;
        for (std::size_t i = 0; i < fv.size() && i < bv.size(); ++i) {
          row(name, param, static_cast<int>(m), fv[i], bv[i]);
        }
      }
    };
    if (c.alpha) {
      modes("circle_delta_radial", *c.alpha, circle_delta_radial(c.radius, *c.alpha, c.m_max),
            circle_delta_bessel(c.radius, *c.alpha, c.m_max));
    }
    if (c.beta) {
      modes("circle_deltaprime_radial", *c.beta, circle_deltaprime_radial(c.radius, *c.beta, c.m_max),
            circle_deltaprime_bessel(c.radius, *c.beta, c.m_max));
    }
  }
  if (rc.outputs.csv) write_file_atomic(output_dir(rc, opts) / "oracle.csv", csv.str());
  return kExitStrict;
}

int run(int argc, char** argv) {
  CLI::App app{"Spectral comparison of delta and delta' interactions on curves"};
  app.require_subcommand(1, 1);
  std::string config;
  CommandOptions opts;
  std::string out;
  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides outputs.directory)");
    sub->add_option("--jobs", opts.jobs, "parallel sweep points")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* solve = add("solve", "mesh, assemble, solve and grade one configuration");
  auto* converge = add("converge", "Richardson table over the refinement levels");
  auto* sweep = add("sweep", "one solve per sweep value");
  auto* oracle = add("oracle", "one-dimensional and radial reference problems");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }
  try {
    auto rc = load_config(config);
    if (const auto seed = seed_from_environment(); seed && rc.study) rc.study->seed = *seed;
    if (!out.empty()) opts.out = out;
    if (solve->parsed()) return cmd_solve(rc, opts, std::cout);
    if (converge->parsed()) return cmd_converge(rc, opts, std::cout);
    if (sweep->parsed()) return cmd_sweep(rc, opts, std::cout);
    if (oracle->parsed()) return cmd_oracle(rc, opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace spec
