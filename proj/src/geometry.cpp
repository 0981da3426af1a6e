#include "surfint/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace surfint {

namespace {

constexpr const char* kModule = "geometry";

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(kModule, what);
}

void check_theta(double theta) {
  require(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi / 2,
          "theta must lie strictly inside (0, pi/2), got " + std::to_string(theta));
}

void check_halfwidth(double L) {
  require(std::isfinite(L) && L > 0.0, "box half-width must be positive, got " + std::to_string(L));
}

// End point of the ray from the origin with slope cot(theta), clipped to the box.
Point ray_exit(double theta, double L) {
  const double c = std::cos(theta) / std::sin(theta);
  if (c <= 1.0) return {L, c * L};
  return {L / c, L};
}

std::vector<InterfaceSegment> circle_polygon(Point center, double radius, int n, int component) {
  std::vector<InterfaceSegment> segs;
  segs.reserve(static_cast<std::size_t>(n));
  auto vertex = [&](int k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k % n) / n;
    return Point{center.x + radius * std::cos(phi), center.y + radius * std::sin(phi)};
  };
  for (int k = 0; k < n; ++k) {
    segs.push_back({vertex(k), vertex(k + 1), component, true});
  }
  return segs;
}

double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  double t = l2 > 0.0 ? dot(p - a, d) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * d);
}

// Even-odd crossing test against the closed polygon formed by one component.
bool inside_component(const InterfaceGeometry& g, int component, Point p) {
  bool inside = false;
  for (const auto& s : g.segments) {
    if (s.component != component) continue;
    const Point a = s.a;
    const Point b = s.b;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

const char* to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::BrokenLine: return "broken_line";
    case GeometryKind::Circle: return "circle";
    case GeometryKind::LinePlusCircle: return "line_plus_circle";
    case GeometryKind::ConeMeridian: return "cone_meridian";
  }
  return "?";
}

GeometryKind geometry_kind_from_string(const std::string& name) {
  if (name == "broken_line") return GeometryKind::BrokenLine;
  if (name == "circle") return GeometryKind::Circle;
  if (name == "line_plus_circle") return GeometryKind::LinePlusCircle;
  if (name == "cone_meridian") return GeometryKind::ConeMeridian;
  throw DomainError(kModule, "unknown geometry kind '" + name + "'");
}

Rect truncation_box(GeometryKind kind, double L) {
  if (kind == GeometryKind::ConeMeridian) return {0.0, L, -L, L};
  return {-L, L, -L, L};
}

bool is_dirichlet(GeometryKind kind, Point p, double L, double tol) {
  if (std::abs(p.y) >= L - tol) return true;
  if (kind == GeometryKind::ConeMeridian) return p.x >= L - tol;
  return std::abs(p.x) >= L - tol;
}

InterfaceGeometry make_broken_line(double theta, double L) {
  check_theta(theta);
  check_halfwidth(L);
  InterfaceGeometry g;
  g.kind = GeometryKind::BrokenLine;
  g.theta = theta;
  g.box_halfwidth = L;
  g.box = truncation_box(g.kind, L);
  const Point e = ray_exit(theta, L);
  const Point apex{0.0, 0.0};
  g.segments.push_back({Point{-e.x, e.y}, apex, 0, false});
  g.segments.push_back({apex, e, 0, false});
  g.apexes.push_back(apex);
  return g;
}

InterfaceGeometry make_circle(double radius, Point center, double L, int n_chords) {
  check_halfwidth(L);
  require(std::isfinite(radius) && radius > 0.0, "circle radius must be positive");
  require(n_chords >= 16, "circle needs at least 16 chords, got " + std::to_string(n_chords));
  require(std::abs(center.x) + radius < L && std::abs(center.y) + radius < L,
          "circle must lie strictly inside the box");
  InterfaceGeometry g;
  g.kind = GeometryKind::Circle;
  g.radius = radius;
  g.center = center;
  g.n_chords = n_chords;
  g.box_halfwidth = L;
  g.box = truncation_box(g.kind, L);
  g.segments = circle_polygon(center, radius, n_chords, 0);
  return g;
}

InterfaceGeometry make_line_plus_circle(double h, double radius, double L, int n_chords) {
  check_halfwidth(L);
  require(std::isfinite(radius) && radius > 0.0, "circle radius must be positive");
  require(std::isfinite(h) && h - radius > 0.0,
          "circle must keep a positive distance from the line (h > R)");
  require(n_chords >= 16, "circle needs at least 16 chords, got " + std::to_string(n_chords));
  require(h + radius < L, "circle must lie strictly inside the box");
  InterfaceGeometry g;
  g.kind = GeometryKind::LinePlusCircle;
  g.radius = radius;
  g.center = {0.0, h};
  g.line_offset = h;
  g.n_chords = n_chords;
  g.box_halfwidth = L;
  g.box = truncation_box(g.kind, L);
  // Omega1 (lower half-plane) to the left of the right-to-left line.
  g.segments.push_back({Point{L, 0.0}, Point{-L, 0.0}, 0, false});
  auto ring = circle_polygon(g.center, radius, n_chords, 1);
  g.segments.insert(g.segments.end(), ring.begin(), ring.end());
  return g;
}

InterfaceGeometry make_cone_meridian(double theta, double L) {
  check_theta(theta);
  check_halfwidth(L);
  InterfaceGeometry g;
  g.kind = GeometryKind::ConeMeridian;
  g.theta = theta;
  g.box_halfwidth = L;
  g.box = truncation_box(g.kind, L);
  g.radial_weight = true;
  const Point apex{0.0, 0.0};
  g.segments.push_back({apex, ray_exit(theta, L), 0, false});
  g.apexes.push_back(apex);
  return g;
}

InterfaceGeometry with_box_halfwidth(const InterfaceGeometry& g, double L) {
  switch (g.kind) {
    case GeometryKind::BrokenLine: return make_broken_line(g.theta, L);
    case GeometryKind::Circle: return make_circle(g.radius, g.center, L, g.n_chords);
    case GeometryKind::LinePlusCircle: return make_line_plus_circle(g.line_offset, g.radius, L, g.n_chords);
    case GeometryKind::ConeMeridian: return make_cone_meridian(g.theta, L);
  }
  throw DomainError(kModule, "unknown geometry kind");
}

double InterfaceGeometry::chord_error() const {
  if (n_chords == 0) return 0.0;
  return radius * (1.0 - std::cos(std::numbers::pi / n_chords));
}

double InterfaceGeometry::interface_length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length();
  return total;
}

bool InterfaceGeometry::is_noncompact(std::size_t segment) const {
  switch (kind) {
    case GeometryKind::Circle: return false;
    case GeometryKind::LinePlusCircle: return segments.at(segment).component == 0;
    default: return true;
  }
}

bool InterfaceGeometry::has_compact_part() const {
  return kind == GeometryKind::Circle || kind == GeometryKind::LinePlusCircle;
}

Side classify_side(const InterfaceGeometry& g, Point p) {
  const double tol = g.tolerance();
  if (!g.box.contains(p, tol)) {
    throw DomainError(kModule, "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                   ") lies outside the box");
  }
  for (const auto& s : g.segments) {
    if (point_segment_distance(p, s.a, s.b) <= tol) return Side::OnInterface;
  }
  switch (g.kind) {
    case GeometryKind::BrokenLine: {
      const double c = std::cos(g.theta) / std::sin(g.theta);
      return p.y > c * std::abs(p.x) ? Side::Omega1 : Side::Omega2;
    }
    case GeometryKind::ConeMeridian: {
      const double c = std::cos(g.theta) / std::sin(g.theta);
      return p.y > c * p.x ? Side::Omega1 : Side::Omega2;
    }
    case GeometryKind::Circle:
      return inside_component(g, 0, p) ? Side::Omega1 : Side::Omega2;
    case GeometryKind::LinePlusCircle:
      if (p.y < 0.0) return Side::Omega1;
      return inside_component(g, 1, p) ? Side::Omega1 : Side::Omega2;
  }
  return Side::Omega2;
}

MaterialData MaterialData::constant(const InterfaceGeometry& g, double alpha, double beta) {
  MaterialData m;
  m.alpha.assign(g.segments.size(), alpha);
  m.beta.assign(g.segments.size(), beta);
  m.validate(g);
  return m;
}

MaterialData MaterialData::borderline(const InterfaceGeometry& g, double alpha) {
  require(alpha > 0.0, "borderline coupling needs alpha > 0");
  return constant(g, alpha, 4.0 / alpha);
}

void MaterialData::validate(const InterfaceGeometry& g) const {
  require(alpha.size() == g.segments.size() && beta.size() == g.segments.size(),
          "material needs one alpha and one beta per interface segment (" +
              std::to_string(g.segments.size()) + ")");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    require(std::isfinite(alpha[i]) && alpha[i] >= 0.0,
            "alpha must be non-negative on segment " + std::to_string(i));
    require(std::isfinite(beta[i]) && beta[i] > 0.0,
            "beta must be positive on segment " + std::to_string(i));
  }
}

namespace {
bool constant_over(const InterfaceGeometry& g, const std::vector<double>& v, bool noncompact_only) {
  std::optional<double> first;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (noncompact_only && !g.is_noncompact(i)) continue;
    if (!first) first = v[i];
    else if (v[i] != *first) return false;
  }
  return true;
}
}  // namespace

bool MaterialData::alpha_constant_on(const InterfaceGeometry& g, bool noncompact_only) const {
  return constant_over(g, alpha, noncompact_only);
}

bool MaterialData::beta_constant_on(const InterfaceGeometry& g, bool noncompact_only) const {
  return constant_over(g, beta, noncompact_only);
}

bool MaterialData::below_borderline(double rel_tol) const {
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] * beta[i] > 4.0 * (1.0 + rel_tol)) return false;
  }
  return true;
}

bool MaterialData::strictly_below_somewhere(double rel_tol) const {
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] * beta[i] < 4.0 * (1.0 - rel_tol)) return true;
  }
  return false;
}

}  // namespace surfint
