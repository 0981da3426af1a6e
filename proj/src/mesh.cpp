#include "surfint/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace surfint {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double angle_at(Point p, Point q, Point r) {
  const Point u = q - p;
  const Point v = r - p;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

// Circle that an interface segment approximates, if any.
struct CircleRef {
  Point center;
  double radius = 0.0;
};

std::optional<CircleRef> circle_of(const InterfaceGeometry& g, int segment) {
  if (segment < 0 || static_cast<std::size_t>(segment) >= g.segments.size()) return std::nullopt;
  if (!g.segments[static_cast<std::size_t>(segment)].on_circle) return std::nullopt;
  return CircleRef{g.center, g.radius};
}

}  // namespace

double Mesh::signed_area(int t) const {
  const auto& v = triangles[static_cast<std::size_t>(t)].v;
  const Point a = nodes[static_cast<std::size_t>(v[0])];
  const Point b = nodes[static_cast<std::size_t>(v[1])];
  const Point c = nodes[static_cast<std::size_t>(v[2])];
  return 0.5 * cross(b - a, c - a);
}

double Mesh::min_angle_deg() const {
  double worst = 180.0;
  for (const auto& t : triangles) {
    const Point a = nodes[static_cast<std::size_t>(t.v[0])];
    const Point b = nodes[static_cast<std::size_t>(t.v[1])];
    const Point c = nodes[static_cast<std::size_t>(t.v[2])];
    worst = std::min({worst, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  }
  return worst * 180.0 / std::numbers::pi;
}

double Mesh::max_edge_length() const {
  double longest = 0.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      longest = std::max(longest, distance(nodes[static_cast<std::size_t>(t.v[k])],
                                           nodes[static_cast<std::size_t>(t.v[(k + 1) % 3])]));
    }
  }
  return longest;
}

std::size_t Mesh::edge_count() const {
  std::unordered_set<std::uint64_t> edges;
  edges.reserve(triangles.size() * 2);
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) edges.insert(edge_key(t.v[k], t.v[(k + 1) % 3]));
  }
  return edges.size();
}

std::vector<char> Mesh::interface_node_mask() const {
  std::vector<char> mask(nodes.size(), 0);
  for (const auto& e : interface_edges) {
    mask[static_cast<std::size_t>(e.a)] = 1;
    mask[static_cast<std::size_t>(e.b)] = 1;
  }
  return mask;
}

void Mesh::rebuild_topology() {
  boundary_nodes.clear();
  const double tol = 1e-10 * box_halfwidth;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (is_dirichlet(kind, nodes[i], box_halfwidth, tol)) boundary_nodes.push_back(static_cast<int>(i));
  }
  std::unordered_map<std::uint64_t, std::array<int, 2>> owners;
  owners.reserve(interface_edges.size() * 2);
  for (const auto& e : interface_edges) owners.emplace(edge_key(e.a, e.b), std::array<int, 2>{-1, -1});
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int k = 0; k < 3; ++k) {
      auto it = owners.find(edge_key(tri.v[k], tri.v[(k + 1) % 3]));
      if (it == owners.end()) continue;
      auto& slot = it->second[tri.region == Side::Omega2 ? 1 : 0];
      if (slot >= 0) throw MeshError("interface edge with two triangles on the same side");
      slot = static_cast<int>(t);
    }
  }
  for (auto& e : interface_edges) {
    const auto& o = owners.at(edge_key(e.a, e.b));
    e.tri1 = o[0];
    e.tri2 = o[1];
  }
}

void snap_circle_nodes(Mesh& m, const InterfaceGeometry& g) {
  for (const auto& e : m.interface_edges) {
    const auto circle = circle_of(g, e.segment);
    if (!circle) continue;
    for (int v : {e.a, e.b}) {
      Point& p = m.nodes[static_cast<std::size_t>(v)];
      const Point d = p - circle->center;
      p = circle->center + (circle->radius / norm(d)) * d;
    }
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!(m.signed_area(static_cast<int>(t)) > 0.0)) {
      throw MeshError("moving interface nodes onto the circle inverted triangle " + std::to_string(t));
    }
  }
}

Mesh refine_uniform(const Mesh& m, const InterfaceGeometry* snap) {
  Mesh out;
  out.kind = m.kind;
  out.box_halfwidth = m.box_halfwidth;
  out.radial_weight = m.radial_weight;
  out.truncation_halfwidths = m.truncation_halfwidths;
  out.nodes = m.nodes;

  std::unordered_map<std::uint64_t, int> segment_of;
  if (snap != nullptr) {
    for (const auto& e : m.interface_edges) segment_of.emplace(edge_key(e.a, e.b), e.segment);
  }
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(m.triangles.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Point p = 0.5 * (m.nodes[static_cast<std::size_t>(a)] + m.nodes[static_cast<std::size_t>(b)]);
    if (snap != nullptr) {
      auto s = segment_of.find(key);
      if (s != segment_of.end()) {
        if (auto circle = circle_of(*snap, s->second)) {
          const Point d = p - circle->center;
          p = circle->center + (circle->radius / norm(d)) * d;
        }
      }
    }
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(p);
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    const int v0 = t.v[0], v1 = t.v[1], v2 = t.v[2];
    const int m01 = mid(v0, v1);
    const int m12 = mid(v1, v2);
    const int m20 = mid(v2, v0);
    out.triangles.push_back({{v0, m01, m20}, t.region});
    out.triangles.push_back({{m01, v1, m12}, t.region});
    out.triangles.push_back({{m20, m12, v2}, t.region});
    out.triangles.push_back({{m01, m12, m20}, t.region});
  }
  out.interface_edges.reserve(2 * m.interface_edges.size());
  for (const auto& e : m.interface_edges) {
    const int c = midpoint.at(edge_key(e.a, e.b));
    InterfaceEdge first{e.a, c, e.segment, -1, -1};
    InterfaceEdge second{c, e.b, e.segment, -1, -1};
    out.interface_edges.push_back(first);
    out.interface_edges.push_back(second);
  }
  out.rebuild_topology();
  return out;
}

DofMap build_dofs(const Mesh& m, DofKind kind, std::optional<double> truncation_halfwidth) {
  const double L = truncation_halfwidth.value_or(m.box_halfwidth);
  const bool known = std::any_of(m.truncation_halfwidths.begin(), m.truncation_halfwidths.end(),
                                 [&](double x) { return std::abs(x - L) <= 1e-12 * m.box_halfwidth; }) ||
                     std::abs(L - m.box_halfwidth) <= 1e-12 * m.box_halfwidth;
  if (!known) {
    throw DomainError("meshing", "truncation half-width " + std::to_string(L) +
                                     " is not one of the boxes the mesh conforms to");
  }
  const std::size_t n = m.nodes.size();
  const auto on_iface = m.interface_node_mask();
  std::vector<Side> node_region(n, Side::Omega1);
  for (const auto& t : m.triangles) {
    for (int v : t.v) node_region[static_cast<std::size_t>(v)] = t.region;
  }

  DofMap d;
  d.kind = kind;
  d.truncation_halfwidth = L;
  d.node_dof1.assign(n, -1);
  d.node_dof2.assign(n, -1);
  const double tol = 1e-10 * m.box_halfwidth;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_dirichlet(m.kind, m.nodes[i], L, tol)) continue;
    const bool cracked = kind == DofKind::Broken && on_iface[i];
    const int first = d.n_dofs++;
    d.node_dof1[i] = first;
    d.dof_node.push_back(static_cast<int>(i));
    if (cracked) {
      d.dof_side.push_back(Side::Omega1);
      const int second = d.n_dofs++;
      d.node_dof2[i] = second;
      d.dof_node.push_back(static_cast<int>(i));
      d.dof_side.push_back(Side::Omega2);
    } else {
      d.node_dof2[i] = first;
      d.dof_side.push_back(on_iface[i] ? Side::OnInterface : node_region[i]);
    }
  }
  return d;
}

std::array<double, 4> EdgeQuadrature::mass(bool radial) const {
  if (!radial) {
    const double s = length / 6.0;
    return {2 * s, s, s, 2 * s};
  }
  const double off = length * (r[0] + r[1]) / 12.0;
  return {length * (r[0] / 4.0 + r[1] / 12.0), off, off, length * (r[0] / 12.0 + r[1] / 4.0)};
}

std::vector<EdgeQuadrature> interface_quadrature(const Mesh& m, const DofMap& cont, const DofMap& broken) {
  std::vector<EdgeQuadrature> out;
  out.reserve(m.interface_edges.size());
  for (std::size_t i = 0; i < m.interface_edges.size(); ++i) {
    const auto& e = m.interface_edges[i];
    const Point a = m.nodes[static_cast<std::size_t>(e.a)];
    const Point b = m.nodes[static_cast<std::size_t>(e.b)];
    EdgeQuadrature q;
    q.edge = static_cast<int>(i);
    q.segment = e.segment;
    q.length = distance(a, b);
    q.r = {a.x, b.x};
    q.cont = {cont.node_dof1[static_cast<std::size_t>(e.a)], cont.node_dof1[static_cast<std::size_t>(e.b)]};
    q.side1 = {broken.node_dof1[static_cast<std::size_t>(e.a)], broken.node_dof1[static_cast<std::size_t>(e.b)]};
    q.side2 = {broken.node_dof2[static_cast<std::size_t>(e.a)], broken.node_dof2[static_cast<std::size_t>(e.b)]};
    out.push_back(q);
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  char buf[96];
  os << "mesh 1\n";
  os << "nodes " << m.nodes.size() << '\n';
  for (const auto& p : m.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  os << "triangles " << m.triangles.size() << '\n';
  for (const auto& t : m.triangles) {
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << (t.region == Side::Omega2 ? 2 : 1) << '\n';
  }
  os << "iface " << m.interface_edges.size() << '\n';
  for (const auto& e : m.interface_edges) os << e.a << ' ' << e.b << ' ' << e.segment << '\n';
}

namespace {
std::size_t read_count(std::istream& is, const std::string& tag) {
  std::string word;
  std::size_t n = 0;
  if (!(is >> word >> n) || word != tag) throw MeshError("mesh file: expected '" + tag + " N'");
  return n;
}
}  // namespace

Mesh read_mesh(std::istream& is, GeometryKind kind, double box_halfwidth) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "mesh" || version != 1) {
    throw MeshError("mesh file: missing 'mesh 1' header");
  }
  Mesh m;
  m.kind = kind;
  m.box_halfwidth = box_halfwidth;
  m.radial_weight = kind == GeometryKind::ConeMeridian;
  m.truncation_halfwidths = {box_halfwidth};
  const std::size_t nn = read_count(is, "nodes");
  m.nodes.resize(nn);
  for (auto& p : m.nodes) {
    std::string xs, ys;
    if (!(is >> xs >> ys)) throw MeshError("mesh file: truncated node list");
    p = {std::strtod(xs.c_str(), nullptr), std::strtod(ys.c_str(), nullptr)};
  }
  const std::size_t nt = read_count(is, "triangles");
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    int region = 0;
    if (!(is >> t.v[0] >> t.v[1] >> t.v[2] >> region)) throw MeshError("mesh file: truncated triangle list");
    for (int v : t.v) {
      if (v < 0 || static_cast<std::size_t>(v) >= nn) throw MeshError("mesh file: node index out of range");
    }
    if (region != 1 && region != 2) throw MeshError("mesh file: region must be 1 or 2");
    t.region = region == 2 ? Side::Omega2 : Side::Omega1;
  }
  const std::size_t ne = read_count(is, "iface");
  m.interface_edges.resize(ne);
  for (auto& e : m.interface_edges) {
    if (!(is >> e.a >> e.b >> e.segment)) throw MeshError("mesh file: truncated interface list");
  }
  m.rebuild_topology();
  return m;
}

}  // namespace surfint
