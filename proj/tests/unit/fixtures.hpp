#pragma once

#include <random>
#include <vector>

#include "surfint/forms.hpp"
#include "surfint/mesh.hpp"

namespace fixture {

struct Problem {
  surfint::InterfaceGeometry g;
  surfint::Mesh mesh;
  surfint::MaterialData mat;
  surfint::AssembledForms F;
};

inline Problem make(const surfint::InterfaceGeometry& g, double h, const surfint::MaterialData& mat,
                    const surfint::AssembleOptions& opts = {}) {
  Problem p{g, surfint::triangulate(g, h), mat, {}};
  const auto c = surfint::build_dofs(p.mesh, surfint::DofKind::Continuous);
  const auto b = surfint::build_dofs(p.mesh, surfint::DofKind::Broken);
  p.F = surfint::assemble(p.mesh, c, b, mat, opts);
  return p;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

// Two triangles sharing the interface edge (0,0)-(1,0), no Dirichlet nodes.
inline surfint::Mesh two_triangles() {
  using namespace surfint;
  Mesh m;
  m.kind = GeometryKind::BrokenLine;
  m.box_halfwidth = 10.0;
  m.truncation_halfwidths = {10.0};
  m.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}, {0.5, -1.0}};
  m.triangles = {{{0, 1, 2}, Side::Omega1}, {{1, 0, 3}, Side::Omega2}};
  m.interface_edges = {{0, 1, 0, -1, -1}};
  m.rebuild_topology();
  return m;
}

}  // namespace fixture
