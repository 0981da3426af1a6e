#include "surfint/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace surfint {

using nlohmann::ordered_json;

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

namespace {

ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_significant(x);
}

ordered_json nums(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

ordered_json threshold_json(const ThresholdInfo& t) {
  return {{"value", t.compact ? ordered_json("zero") : num(t.value)},
          {"numeric", num(t.value)},
          {"compact", t.compact},
          {"conjectured", t.conjectured},
          {"note", t.note}};
}

ordered_json geometry_json(const InterfaceGeometry& g) {
  ordered_json j;
  j["kind"] = to_string(g.kind);
  switch (g.kind) {
    case GeometryKind::BrokenLine:
    case GeometryKind::ConeMeridian: j["theta"] = g.theta; break;
    case GeometryKind::Circle:
      j["radius"] = g.radius;
      j["center"] = {g.center.x, g.center.y};
      j["n_chords"] = g.n_chords;
      break;
    case GeometryKind::LinePlusCircle:
      j["radius"] = g.radius;
      j["line_offset"] = g.line_offset;
      j["n_chords"] = g.n_chords;
      break;
  }
  j["box_halfwidth"] = g.box_halfwidth;
  j["segments"] = g.segments.size();
  return j;
}

ordered_json truncation_json(const TruncationStudy& t) {
  ordered_json per_box = ordered_json::array();
  for (const auto& v : t.values) per_box.push_back(nums(v));
  return {{"values", per_box}, {"delta", nums(t.delta)}, {"stabilized", t.stabilized}, {"monotone", t.monotone}};
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

ordered_json report_json(const StudyConfig& c, const StudyResult& r) {
  ordered_json j;
  j["geometry"] = geometry_json(c.geometry);
  j["material"] = {{"alpha", c.material.alpha},
                   {"beta", c.material.beta},
                   {"below_borderline", c.material.below_borderline()},
                   {"strictly_below_somewhere", c.material.strictly_below_somewhere()}};
  j["thresholds"] = {{"delta", threshold_json(r.threshold_delta)},
                     {"deltaprime", threshold_json(r.threshold_deltaprime)}};
  ordered_json pairs = ordered_json::array();
  for (const auto& p : r.theorem.pairs) {
    pairs.push_back({{"n", p.n},
                     {"lambda_delta", num(p.lambda_delta)},
                     {"lambda_deltaprime", num(p.lambda_deltaprime)},
                     {"gap", num(p.gap)},
                     {"error", num(p.error)},
                     {"verdict", to_string(p.verdict)}});
  }
  j["pairs"] = pairs;
  const bool violated = r.theorem.violated() || !r.comparison_holds;
  j["verdict"] = violated ? "violated" : to_string(r.theorem.overall());
  j["comparison"] = {{"applicable", r.comparison_applicable},
                     {"holds", r.comparison_holds},
                     {"worst_excess", r.comparison_applicable ? num(r.worst_excess) : ordered_json(nullptr)}};
  ordered_json counting = ordered_json::array();
  for (const auto& p : r.counting) {
    counting.push_back({{"mu", num(p.mu)}, {"N_delta", p.n_delta}, {"N_deltaprime", p.n_deltaprime}});
  }
  j["counting"] = counting;
  ordered_json order_d = ordered_json::array(), order_dp = ordered_json::array();
  ordered_json lim_d = ordered_json::array(), lim_dp = ordered_json::array();
  for (const auto& x : r.richardson_delta) {
    order_d.push_back(num(x.order));
    lim_d.push_back(num(x.limit));
  }
  for (const auto& x : r.richardson_deltaprime) {
    order_dp.push_back(num(x.order));
    lim_dp.push_back(num(x.limit));
  }
  ordered_json lv_d = ordered_json::array(), lv_dp = ordered_json::array();
  for (const auto& v : r.levels_delta) lv_d.push_back(nums(v));
  for (const auto& v : r.levels_deltaprime) lv_dp.push_back(nums(v));
  j["convergence"] = {{"order", {{"delta", order_d}, {"deltaprime", order_dp}}},
                      {"limits", {{"delta", lim_d}, {"deltaprime", lim_dp}}},
                      {"h", r.level_h},
                      {"levels", {{"delta", lv_d}, {"deltaprime", lv_dp}}},
                      {"error", {{"delta", nums(r.error_delta)}, {"deltaprime", nums(r.error_deltaprime)}}}};
  j["truncation"] = {{"box_halfwidths", c.box_halfwidths},
                     {"delta", truncation_json(r.truncation_delta)},
                     {"deltaprime", truncation_json(r.truncation_deltaprime)}};
  j["mesh"] = {{"h", c.h},
               {"levels", c.levels},
               {"snap_to_circle", c.snap_to_circle},
               {"nodes", r.nodes},
               {"dofs_continuous", r.dofs_continuous},
               {"dofs_broken", r.dofs_broken}};
  j["solver"] = {{"k", c.k}, {"tol", c.tol}, {"seed", c.seed}};
  return j;
}

std::string report_csv(const StudyResult& r) {
  std::ostringstream os;
  os << "n,lambda_delta,lambda_deltaprime,gap,error,verdict,order_delta,order_deltaprime,limit_delta,"
        "limit_deltaprime\n";
  const auto& vd = r.levels_delta.back();
  const auto& vdp = r.levels_deltaprime.back();
  for (std::size_t i = 0; i < vd.size() && i < vdp.size(); ++i) {
    const char* verdict = i < r.theorem.pairs.size() ? to_string(r.theorem.pairs[i].verdict) : "unpaired";
    os << i + 1 << ',' << fmt(round_significant(vd[i])) << ',' << fmt(round_significant(vdp[i])) << ','
       << fmt(round_significant(vd[i] - vdp[i])) << ',' << fmt(round_significant(r.error_delta[i] + r.error_deltaprime[i]))
       << ',' << verdict << ',' << fmt(round_significant(r.richardson_delta[i].order)) << ','
       << fmt(round_significant(r.richardson_deltaprime[i].order)) << ','
       << fmt(round_significant(r.richardson_delta[i].limit)) << ','
       << fmt(round_significant(r.richardson_deltaprime[i].limit)) << '\n';
  }
  return os.str();
}

std::string convergence_csv(const StudyResult& r) {
  std::ostringstream os;
  os << "operator,h,n,lambda\n";
  for (std::size_t l = 0; l < r.level_h.size(); ++l) {
    for (std::size_t i = 0; i < r.levels_delta[l].size(); ++i) {
      os << "delta," << fmt(r.level_h[l]) << ',' << i + 1 << ',' << fmt(round_significant(r.levels_delta[l][i]))
         << '\n';
    }
    for (std::size_t i = 0; i < r.levels_deltaprime[l].size(); ++i) {
      os << "deltaprime," << fmt(r.level_h[l]) << ',' << i + 1 << ','
         << fmt(round_significant(r.levels_deltaprime[l][i])) << '\n';
    }
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("report", "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("report", "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("report", "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace surfint
