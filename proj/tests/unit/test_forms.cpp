#include "doctest.h"

#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "surfint/forms.hpp"

using namespace surfint;
using std::numbers::pi;

namespace {

// Nodal value of a coefficient vector as seen from a triangle of the given region.
long double nodal(const DofMap& d, std::span<const double> u, int node, Side region) {
  const int k = d.dof(node, region);
  return k < 0 ? 0.0L : static_cast<long double>(u[static_cast<std::size_t>(k)]);
}

// Energy recomputed from the gradient of the linear interpolant and Simpson's rule on
// the edges (exact for the quadratic and cubic edge integrands).
long double reintegrate(const Mesh& m, const AssembledForms& F, FormKind which, std::span<const double> u) {
  const DofMap& d = F.dofs(which);
  const bool radial = F.weight == Weight::Radial;
  long double total = 0.0L;
  for (const auto& t : m.triangles) {
    const auto P = [&](int k) { return m.nodes[static_cast<std::size_t>(t.v[static_cast<std::size_t>(k)])]; };
    const long double x0 = P(0).x, y0 = P(0).y;
    const long double x1 = P(1).x - x0, y1 = P(1).y - y0;
    const long double x2 = P(2).x - x0, y2 = P(2).y - y0;
    const long double du1 = nodal(d, u, t.v[1], t.region) - nodal(d, u, t.v[0], t.region);
    const long double du2 = nodal(d, u, t.v[2], t.region) - nodal(d, u, t.v[0], t.region);
    const long double det = x1 * y2 - x2 * y1;
    const long double gx = (du1 * y2 - du2 * y1) / det;
    const long double gy = (x1 * du2 - x2 * du1) / det;
    long double w = det / 2;
    if (radial) w *= (P(0).x + P(1).x + P(2).x) / 3.0L;
    total += w * (gx * gx + gy * gy);
  }
  for (std::size_t e = 0; e < m.interface_edges.size(); ++e) {
    const auto& ie = m.interface_edges[e];
    const Point a = m.nodes[static_cast<std::size_t>(ie.a)];
    const Point b = m.nodes[static_cast<std::size_t>(ie.b)];
    const long double len = distance(a, b);
    auto weight = [&](long double s) { return radial ? (1 - s) * a.x + s * b.x : 1.0L; };
    auto integrand = [&](long double ua, long double ub, long double s) {
      const long double v = (1 - s) * ua + s * ub;
      return weight(s) * v * v;
    };
    long double ua, ub, coef;
    if (which == FormKind::Delta) {
      ua = nodal(d, u, ie.a, Side::Omega1);
      ub = nodal(d, u, ie.b, Side::Omega1);
      coef = F.edge_alpha[e];
    } else {
      ua = nodal(d, u, ie.a, Side::Omega1) - nodal(d, u, ie.a, Side::Omega2);
      ub = nodal(d, u, ie.b, Side::Omega1) - nodal(d, u, ie.b, Side::Omega2);
      coef = 1.0L / F.edge_beta[e];
    }
    const long double simpson =
        len / 6 * (integrand(ua, ub, 0) + 4 * integrand(ua, ub, 0.5L) + integrand(ua, ub, 1));
    total -= coef * simpson;
  }
  return total;
}

}  // namespace

TEST_CASE("single edge blocks") {
  const auto m = fixture::two_triangles();
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  REQUIRE(c.size() == 4);
  REQUIRE(b.size() == 6);
  const double alpha = 3.0, beta = 0.5, ell = 1.0;
  const auto F = assemble(m, c, b, MaterialData{{alpha}, {beta}});
  const int c0 = c.node_dof1[0], c1 = c.node_dof1[1];
  CHECK(F.T_alpha.at(c0, c0) == doctest::Approx(alpha * ell / 3));
  CHECK(F.T_alpha.at(c0, c1) == doctest::Approx(alpha * ell / 6));
  const int p0 = b.node_dof1[0], p1 = b.node_dof1[1];
  const int q0 = b.node_dof2[0], q1 = b.node_dof2[1];
  CHECK(F.J_beta.at(p0, p0) == doctest::Approx(ell / 3 / beta));
  CHECK(F.J_beta.at(p0, p1) == doctest::Approx(ell / 6 / beta));
  CHECK(F.J_beta.at(p0, q0) == doctest::Approx(-ell / 3 / beta));
  CHECK(F.J_beta.at(p0, q1) == doctest::Approx(-ell / 6 / beta));
  CHECK(F.J_beta.at(q1, q1) == doctest::Approx(ell / 3 / beta));
  CHECK(b.dof_side[static_cast<std::size_t>(p0)] == Side::Omega1);
  CHECK(b.dof_side[static_cast<std::size_t>(q0)] == Side::Omega2);
}

TEST_CASE("alpha zero gives the free Laplacian") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 0.0, 1.0));
  CHECK(p.F.T_alpha.max_abs() == 0.0);
  const auto A = p.F.A_delta();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto u = fixture::random_vector(p.F.cont.size(), rng);
    CHECK(A.quadratic(u) == doctest::Approx(p.F.K_cont.quadratic(u)).epsilon(1e-14));
    CHECK(form_value(p.F, FormKind::Delta, u) >= 0.0);
  }
}

TEST_CASE("symmetry and definiteness") {
  for (const auto& g : {make_broken_line(pi / 4, 4.0), make_circle(1.0, {0, 0}, 3.0, 32),
                        make_cone_meridian(pi / 3, 3.0)}) {
    AssembleOptions o;
    o.weight = g.radial_weight ? Weight::Radial : Weight::None;
    const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 2.0, 1.5), o);
    for (const auto* A : {&p.F.K_cont, &p.F.M_cont, &p.F.T_alpha, &p.F.K_brok, &p.F.M_brok, &p.F.J_beta}) {
      CHECK(A->asymmetry() <= 1e-12 * A->max_abs());
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      const auto x = fixture::random_vector(p.F.cont.size(), rng);
      const auto y = fixture::random_vector(p.F.broken.size(), rng);
      CHECK(p.F.M_cont.quadratic(x) > 0.0);
      CHECK(p.F.M_brok.quadratic(y) > 0.0);
      CHECK(p.F.T_alpha.quadratic(x) >= 0.0);
      CHECK(p.F.J_beta.quadratic(y) >= 0.0);
      CHECK(p.F.K_cont.quadratic(x) >= 0.0);
    }
  }
}

TEST_CASE("form values match independent re-integration") {
  for (const auto& g : {make_broken_line(pi / 3, 4.0), make_line_plus_circle(2.0, 0.8, 4.0, 24),
                        make_cone_meridian(pi / 4, 3.0)}) {
    AssembleOptions o;
    o.weight = g.radial_weight ? Weight::Radial : Weight::None;
    auto mat = MaterialData::constant(g, 1.7, 0.9);
    mat.alpha[0] = 2.5;
    const auto p = fixture::make(g, 0.35, mat, o);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      for (auto which : {FormKind::Delta, FormKind::DeltaPrime}) {
        const auto u = fixture::random_vector(p.F.dofs(which).size(), rng);
        const double got = form_value(p.F, which, u);
        const auto ref = static_cast<double>(reintegrate(p.mesh, p.F, which, u));
        CHECK(got == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("radial mass integrates r exactly") {
  auto m = fixture::two_triangles();
  m.kind = GeometryKind::ConeMeridian;
  for (auto& n : m.nodes) n.x += 2.0;
  m.rebuild_topology();
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  AssembleOptions o;
  o.weight = Weight::Radial;
  const auto F = assemble(m, c, b, MaterialData{{1.0}, {1.0}}, o);
  // 1^T M x is the integral of r * r.
  std::vector<double> x(c.size()), ones(c.size(), 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) x[i] = m.nodes[static_cast<std::size_t>(c.dof_node[i])].x;
  long double want = 0.0L;
  for (const auto& t : m.triangles) {
    const Point a = m.nodes[static_cast<std::size_t>(t.v[0])];
    const Point bb = m.nodes[static_cast<std::size_t>(t.v[1])];
    const Point cc = m.nodes[static_cast<std::size_t>(t.v[2])];
    const long double area = 0.5L * cross(bb - a, cc - a);
    want += area / 6 * (a.x * a.x + bb.x * bb.x + cc.x * cc.x + a.x * bb.x + bb.x * cc.x + a.x * cc.x);
  }
  CHECK(dot_serial(ones, F.M_cont * x) == doctest::Approx(static_cast<double>(want)).epsilon(1e-13));
  // Stiffness of u = x is the integral of r.
  long double area_r = 0.0L;
  for (const auto& t : m.triangles) {
    const Point a = m.nodes[static_cast<std::size_t>(t.v[0])];
    const Point bb = m.nodes[static_cast<std::size_t>(t.v[1])];
    const Point cc = m.nodes[static_cast<std::size_t>(t.v[2])];
    area_r += 0.5L * cross(bb - a, cc - a) * (a.x + bb.x + cc.x) / 3;
  }
  CHECK(F.K_cont.quadratic(x) == doctest::Approx(static_cast<double>(area_r)).epsilon(1e-13));
}

TEST_CASE("embed") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto p = fixture::make(g, 0.5, MaterialData::constant(g, 2.0, 2.0));
  std::mt19937_64 rng(7);
  const auto u = fixture::random_vector(p.F.cont.size(), rng);
  const auto e = embed(p.F, u);
  CHECK(p.F.J_beta.quadratic(e) == doctest::Approx(0.0).scale(1.0));
  CHECK(p.F.K_brok.quadratic(e) == doctest::Approx(p.F.K_cont.quadratic(u)).epsilon(1e-13));
  CHECK(p.F.M_brok.quadratic(e) == doctest::Approx(p.F.M_cont.quadratic(u)).epsilon(1e-13));
  const std::vector<double> zero(p.F.cont.size(), 0.0);
  for (double x : embed(p.F, zero)) CHECK(x == 0.0);
  CHECK_THROWS_AS(embed(p.F, e), SizeError);
  CHECK_THROWS_AS(form_value(p.F, FormKind::Delta, e), SizeError);
}

TEST_CASE("apply_U") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 2.0, 2.0));
  std::mt19937_64 rng(9);
  const auto v = fixture::random_vector(p.F.broken.size(), rng);
  const auto Uv = apply_U(p.F, v);
  CHECK(apply_U(p.F, Uv) == v);
  CHECK(p.F.K_brok.quadratic(Uv) == doctest::Approx(p.F.K_brok.quadratic(v)).epsilon(1e-13));
  CHECK(p.F.M_brok.quadratic(Uv) == doctest::Approx(p.F.M_brok.quadratic(v)).epsilon(1e-13));

  const auto u = fixture::random_vector(p.F.cont.size(), rng);
  const auto w = apply_U(p.F, embed(p.F, u));
  for (const auto& q : p.F.edges) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double jump = w[static_cast<std::size_t>(q.side1[k])] - w[static_cast<std::size_t>(q.side2[k])];
      CHECK(jump == doctest::Approx(2.0 * u[static_cast<std::size_t>(q.cont[k])]));
    }
  }
}

TEST_CASE("borderline identity") {
  const auto g = make_circle(1.0, {0, 0}, 3.0, 32);
  auto mat = MaterialData::borderline(g, 5.0);
  const auto p = fixture::make(g, 0.3, mat);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto u = fixture::random_vector(p.F.cont.size(), rng);
    const double scale = std::abs(form_value(p.F, FormKind::Delta, u)) + dot_serial(u, u);
    CHECK(std::abs(borderline_identity_check(p.F, u)) <= 1e-12 * scale);
  }

  mat.beta[5] = 0.5 * mat.beta[5];
  const auto q = fixture::make(g, 0.3, mat);
  std::vector<double> ones(q.F.cont.size(), 1.0);
  CHECK(borderline_identity_check(q.F, ones) < 0.0);

  // Zero trace on the interface: any beta gives zero residual.
  auto u = fixture::random_vector(q.F.cont.size(), rng);
  for (const auto& e : q.F.edges) {
    for (int d : e.cont) u[static_cast<std::size_t>(d)] = 0.0;
  }
  CHECK(borderline_identity_check(q.F, u) == doctest::Approx(0.0).scale(1e-12 * dot_serial(u, u)));
}

TEST_CASE("monotonicity in alpha") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto weak = fixture::make(g, 0.5, MaterialData::constant(g, 1.0, 1.0));
  const auto strong = fixture::make(g, 0.5, MaterialData{{1.0, 3.0}, {1.0, 1.0}});
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto x = fixture::random_vector(weak.F.cont.size(), rng);
    CHECK(form_value(strong.F, FormKind::Delta, x) <= form_value(weak.F, FormKind::Delta, x));
  }
}

TEST_CASE("parallel and serial assembly are bit-identical") {
  const auto g = make_line_plus_circle(2.0, 0.8, 4.0, 24);
  const auto mat = MaterialData::constant(g, 1.3, 0.7);
  AssembleOptions serial;
  serial.execution = Execution::Serial;
  const auto a = fixture::make(g, 0.2, mat);
  const auto b = fixture::make(g, 0.2, mat, serial);
  CHECK(a.F.K_cont.val == b.F.K_cont.val);
  CHECK(a.F.M_brok.val == b.F.M_brok.val);
  CHECK(a.F.J_beta.val == b.F.J_beta.val);
  CHECK(a.F.K_brok.col == b.F.K_brok.col);
}

TEST_CASE("per-edge override and validation") {
  const auto g = make_broken_line(pi / 4, 4.0);
  const auto m = triangulate(g, 1.0);
  const auto c = build_dofs(m, DofKind::Continuous);
  const auto b = build_dofs(m, DofKind::Broken);
  const auto mat = MaterialData::constant(g, 1.0, 1.0);
  AssembleOptions o;
  o.edge_alpha = std::vector<double>(m.interface_edges.size(), 0.0);
  CHECK(assemble(m, c, b, mat, o).T_alpha.max_abs() == 0.0);
  o.edge_alpha = std::vector<double>(1, 0.0);
  CHECK_THROWS_AS(assemble(m, c, b, mat, o), SizeError);
  CHECK_THROWS_AS(assemble(m, c, b, MaterialData{{1.0, 1.0}, {1.0, 0.0}}), DomainError);
  AssembleOptions radial;
  radial.weight = Weight::Radial;
  CHECK_THROWS_AS(assemble(m, c, b, mat, radial), DomainError);
}

TEST_CASE("broken mass restricted to embedded vectors is the continuous mass") {
  const auto g = make_line_plus_circle(2.0, 0.8, 4.0, 24);
  const auto p = fixture::make(g, 0.4, MaterialData::constant(g, 1.0, 1.0));
  const int n = static_cast<int>(p.F.cont.size());
  for (int i = 0; i < n; i += 7) {
    std::vector<double> ei(static_cast<std::size_t>(n), 0.0);
    ei[static_cast<std::size_t>(i)] = 1.0;
    const auto Mb = p.F.M_brok * embed(p.F, ei);
    for (int j = 0; j < n; j += 5) {
      std::vector<double> ej(static_cast<std::size_t>(n), 0.0);
      ej[static_cast<std::size_t>(j)] = 1.0;
      CHECK(dot_serial(embed(p.F, ej), Mb) == doctest::Approx(p.F.M_cont.at(i, j)).scale(1e-15));
    }
  }
}
