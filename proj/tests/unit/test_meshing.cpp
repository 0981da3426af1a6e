#include "doctest.h"

#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "surfint/mesh.hpp"

using namespace surfint;
using std::numbers::pi;

namespace {

std::vector<double> covered_length_per_segment(const Mesh& m, std::size_t n_segments) {
  std::vector<double> len(n_segments, 0.0);
  for (const auto& e : m.interface_edges) {
    len[static_cast<std::size_t>(e.segment)] +=
        distance(m.nodes[static_cast<std::size_t>(e.a)], m.nodes[static_cast<std::size_t>(e.b)]);
  }
  return len;
}

void check_valid(const InterfaceGeometry& g, const Mesh& m) {
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    REQUIRE(m.signed_area(static_cast<int>(t)) > 0.0);
  }
  CHECK(m.min_angle_deg() >= 20.0 - 1e-9);
  const auto len = covered_length_per_segment(m, g.segments.size());
  for (std::size_t s = 0; s < g.segments.size(); ++s) {
    CHECK(len[s] == doctest::Approx(g.segments[s].length()).epsilon(1e-10));
  }
  for (const auto& e : m.interface_edges) {
    REQUIRE(e.tri1 >= 0);
    REQUIRE(e.tri2 >= 0);
    CHECK(m.triangles[static_cast<std::size_t>(e.tri1)].region == Side::Omega1);
    CHECK(m.triangles[static_cast<std::size_t>(e.tri2)].region == Side::Omega2);
  }
  for (const auto& t : m.triangles) {
    const Point c = (1.0 / 3.0) * (m.nodes[static_cast<std::size_t>(t.v[0])] +
                                   m.nodes[static_cast<std::size_t>(t.v[1])] +
                                   m.nodes[static_cast<std::size_t>(t.v[2])]);
    const Side s = classify_side(g, c);
    if (s != Side::OnInterface) CHECK(s == t.region);
  }
}

}  // namespace

TEST_CASE("Euler relation on the broken line mesh") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto m = triangulate(g, 1.0);
  const auto V = static_cast<long>(m.nodes.size());
  const auto E = static_cast<long>(m.edge_count());
  const auto F = static_cast<long>(m.triangles.size());
  CHECK(V - E + F == 1);
  CHECK(m.max_edge_length() <= 1.0 + 1e-12);
  check_valid(g, m);
}

TEST_CASE("all catalog geometries mesh validly") {
  for (const auto& g : {make_broken_line(pi / 4, 4.0), make_broken_line(pi / 9, 3.0),
                        make_circle(1.0, {0, 0}, 3.0, 32), make_line_plus_circle(2.0, 0.7, 4.0, 24),
                        make_cone_meridian(pi / 4, 3.0), make_cone_meridian(pi / 8, 3.0)}) {
    CAPTURE(to_string(g.kind));
    check_valid(g, triangulate(g, 0.4));
  }
}

TEST_CASE("input angles below the quality bound are reported") {
  // The cone ray meets the symmetry axis at 18 degrees.
  CHECK_THROWS_AS(triangulate(make_cone_meridian(pi / 10, 3.0), 0.4), MeshError);
}

TEST_CASE("circle polygon sides all appear as edge unions") {
  const auto g = make_circle(1.0, {0, 0}, 8.0, 64);
  const auto m = triangulate(g, 0.25);
  std::set<int> seen;
  for (const auto& e : m.interface_edges) seen.insert(e.segment);
  CHECK(seen.size() == 64);
  check_valid(g, m);
}

TEST_CASE("steiner points on circle chords lie on the circle") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto m = triangulate(g, 0.05);
  REQUIRE(m.interface_edges.size() > 32);
  auto length = [](const Mesh& mesh) {
    double l = 0.0;
    for (const auto& e : mesh.interface_edges) {
      l += distance(mesh.nodes[static_cast<std::size_t>(e.a)], mesh.nodes[static_cast<std::size_t>(e.b)]);
    }
    return l;
  };
  for (const auto& e : m.interface_edges) {
    CHECK(norm(m.nodes[static_cast<std::size_t>(e.a)]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const auto f = refine_uniform(m, &g);
  CHECK(length(m) < length(f));
  CHECK(length(f) < 2.0 * pi);
  for (std::size_t t = 0; t < f.triangles.size(); ++t) CHECK(f.signed_area(static_cast<int>(t)) > 0.0);

  TriangulateOptions raw;
  raw.h_target = 0.05;
  raw.snap_circle_nodes = false;
  const auto chords = triangulate(g, raw);
  CHECK(length(chords) == doctest::Approx(g.interface_length()).epsilon(1e-12));
}

TEST_CASE("nested boxes are conforming") {
  const auto g = make_broken_line(pi / 4, 6.0);
  TriangulateOptions opts;
  opts.h_target = 0.6;
  opts.nested_halfwidths = {3.0, 4.5};
  const auto m = triangulate(g, opts);
  check_valid(g, m);
  REQUIRE(m.truncation_halfwidths.size() == 3);
  const auto big = build_dofs(m, DofKind::Continuous);
  const auto small = build_dofs(m, DofKind::Continuous, 3.0);
  CHECK(small.size() < big.size());
  // Every triangle lies either inside or outside the inner box.
  for (const auto& t : m.triangles) {
    int inside = 0;
    for (int v : t.v) {
      const Point p = m.nodes[static_cast<std::size_t>(v)];
      if (std::abs(p.x) <= 3.0 + 1e-12 && std::abs(p.y) <= 3.0 + 1e-12) ++inside;
    }
    const Point c = (1.0 / 3.0) * (m.nodes[static_cast<std::size_t>(t.v[0])] +
                                   m.nodes[static_cast<std::size_t>(t.v[1])] +
                                   m.nodes[static_cast<std::size_t>(t.v[2])]);
    const bool centroid_inside = std::abs(c.x) < 3.0 && std::abs(c.y) < 3.0;
    if (centroid_inside) CHECK(inside == 3);
  }
  CHECK_THROWS_AS(build_dofs(m, DofKind::Continuous, 4.0), DomainError);
}

TEST_CASE("triangulate rejects bad sizes") {
  const auto g = make_broken_line(pi / 4, 4.0);
  CHECK_THROWS_AS(triangulate(g, 0.0), DomainError);
  CHECK_THROWS_AS(triangulate(g, 2.0), DomainError);
}

TEST_CASE("red refinement") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto m = triangulate(g, 0.8);
  const auto f = refine_uniform(m);
  CHECK(f.triangles.size() == 4 * m.triangles.size());
  CHECK(f.interface_edges.size() == 2 * m.interface_edges.size());
  CHECK(f.min_angle_deg() == doctest::Approx(m.min_angle_deg()).epsilon(1e-9));
  for (std::size_t i = 0; i < m.nodes.size(); ++i) CHECK(f.nodes[i] == m.nodes[i]);
  check_valid(g, f);
}

TEST_CASE("snapped refinement puts new circle nodes on the circle") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto f = refine_uniform(triangulate(g, 0.4), &g);
  for (const auto& e : f.interface_edges) {
    CHECK(norm(f.nodes[static_cast<std::size_t>(e.a)]) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("dof maps") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto m = triangulate(g, 0.5);
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  const auto mask = m.interface_node_mask();
  int n_iface = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) n_iface += mask[i];
  CHECK(static_cast<int>(c.size()) == static_cast<int>(m.nodes.size() - m.boundary_nodes.size()));
  CHECK(b.size() - c.size() == static_cast<std::size_t>(n_iface));
  for (const auto& t : m.triangles) {
    for (int v : t.v) {
      const int d = b.dof(v, t.region);
      if (d < 0) continue;
      const Side s = b.dof_side[static_cast<std::size_t>(d)];
      CHECK((s == t.region || s == Side::OnInterface));
    }
  }
}

TEST_CASE("broken line endpoints on the box are not duplicated") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto m = triangulate(g, 1.0);
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  const auto mask = m.interface_node_mask();
  int free_iface = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && c.node_dof1[i] >= 0) ++free_iface;
  }
  CHECK(b.size() - c.size() == static_cast<std::size_t>(free_iface));
}

TEST_CASE("interface quadrature") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto m = triangulate(g, 0.5);
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  const auto q = interface_quadrature(m, c, b);
  double total = 0.0;
  for (const auto& e : q) {
    total += e.length;
    const auto mm = e.mass(false);
    CHECK(mm[0] == doctest::Approx(e.length / 3));
    CHECK(mm[1] == doctest::Approx(e.length / 6));
    CHECK(e.side1[0] != e.side2[0]);
  }
  CHECK(total == doctest::Approx(g.interface_length()).epsilon(1e-10));

  Mesh empty;
  CHECK(interface_quadrature(empty, DofMap{}, DofMap{}).empty());
}

TEST_CASE("radial edge mass integrates r exactly") {
  EdgeQuadrature e;
  e.length = 2.0;
  e.r = {1.0, 3.0};
  const auto m = e.mass(true);
  // Sum of all entries is the integral of r along the edge.
  CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(2.0 * 2.0));
  CHECK(m[1] == m[2]);
}

TEST_CASE("mesh text round trip is bit exact") {
  const auto g = make_line_plus_circle(2.0, 0.7, 4.0, 24);
  const auto m = triangulate(g, 0.5);
  std::stringstream ss;
  write_mesh(ss, m);
  const auto r = read_mesh(ss, m.kind, m.box_halfwidth);
  REQUIRE(r.nodes.size() == m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) CHECK(r.nodes[i] == m.nodes[i]);
  CHECK(r.triangles.size() == m.triangles.size());
  CHECK(r.interface_edges.size() == m.interface_edges.size());
  std::stringstream bad("mesh 2\n");
  CHECK_THROWS_AS(read_mesh(bad, m.kind, 4.0), MeshError);
}
