#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "surfint/common.hpp"
#include "surfint/geometry.hpp"

namespace surfint {

struct Triangle {
  std::array<int, 3> v{};   // counter-clockwise node ids
  Side region = Side::Omega1;
};

// A mesh edge lying on the interaction support.
struct InterfaceEdge {
  int a = -1;
  int b = -1;
  int segment = -1;     // geometry segment the edge came from
  int tri1 = -1;        // adjacent triangle on the Omega1 side
  int tri2 = -1;        // adjacent triangle on the Omega2 side
};

struct Mesh {
  GeometryKind kind = GeometryKind::BrokenLine;
  double box_halfwidth = 0.0;
  bool radial_weight = false;
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<InterfaceEdge> interface_edges;
  std::vector<int> boundary_nodes;           // outer box Dirichlet nodes, ascending
  std::vector<double> truncation_halfwidths; // nested boxes the mesh conforms to, ascending

  double signed_area(int t) const;
  double min_angle_deg() const;
  double max_edge_length() const;
  std::size_t edge_count() const;
  std::vector<char> interface_node_mask() const;
  double tolerance() const { return 1e-12 * box_halfwidth; }

  // Recomputes boundary nodes and the side triangles of every interface edge.
  void rebuild_topology();
};

struct TriangulateOptions {
  double h_target = 0.0;
  double min_angle_deg = 20.0;
  // Extra square boxes (half-widths < L) meshed as internal constraints so that
  // the problems truncated to those boxes live on nested subspaces of one mesh.
  std::vector<double> nested_halfwidths;
  bool grade_apexes = true;
  // Move Steiner points inserted on circle chords onto the circle.
  bool snap_circle_nodes = true;
  std::size_t max_vertices = 4'000'000;
};

// Constrained Delaunay triangulation of the geometry box with Ruppert refinement.
// Throws MeshError if the quality bound cannot be met within the vertex budget.
Mesh triangulate(const InterfaceGeometry& g, const TriangulateOptions& opts);
Mesh triangulate(const InterfaceGeometry& g, double h_target);

// Projects the endpoints of interface edges approximating a circle onto it.
// Throws MeshError if a triangle would be inverted.
void snap_circle_nodes(Mesh& m, const InterfaceGeometry& g);

// Red refinement: every triangle split into four through its edge midpoints.
// With `snap` set, new midpoints of edges approximating a circle are moved onto
// that circle (the resulting spaces are then no longer exactly nested).
Mesh refine_uniform(const Mesh& m, const InterfaceGeometry* snap = nullptr);

enum class DofKind { Continuous, Broken };

// Node to degree-of-freedom assignment. Dirichlet nodes map to -1.
// For the broken space, interface nodes carry one dof per side.
struct DofMap {
  DofKind kind = DofKind::Continuous;
  double truncation_halfwidth = 0.0;
  int n_dofs = 0;
  std::vector<int> node_dof1;   // dof used by Omega1 triangles
  std::vector<int> node_dof2;   // dof used by Omega2 triangles (== node_dof1 off the interface)
  std::vector<int> dof_node;
  std::vector<Side> dof_side;   // Omega1 / Omega2; OnInterface for uncracked interface dofs

  int dof(int node, Side region) const {
    return region == Side::Omega2 ? node_dof2[static_cast<std::size_t>(node)]
                                  : node_dof1[static_cast<std::size_t>(node)];
  }
  std::size_t size() const { return static_cast<std::size_t>(n_dofs); }
};

// `truncation_halfwidth` selects one of the mesh's nested boxes; the default is the outer box.
DofMap build_dofs(const Mesh& m, DofKind kind, std::optional<double> truncation_halfwidth = {});

// Exact integration data of one interface edge for products of linear traces.
struct EdgeQuadrature {
  int edge = -1;
  int segment = -1;
  double length = 0.0;
  std::array<double, 2> r{};      // radial coordinate of the endpoints (weighted forms)
  std::array<int, 2> cont{};      // continuous dofs of the endpoints
  std::array<int, 2> side1{};     // broken dofs on the Omega1 side
  std::array<int, 2> side2{};     // broken dofs on the Omega2 side

  // Local 2x2 edge mass matrix: integral of phi_i phi_j, optionally weighted by r.
  std::array<double, 4> mass(bool radial) const;
};

std::vector<EdgeQuadrature> interface_quadrature(const Mesh& m, const DofMap& cont, const DofMap& broken);

// Text mesh format: "mesh 1", "nodes N", "triangles T" (i j k region), "iface E" (i j segment).
void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is, GeometryKind kind, double box_halfwidth);

}  // namespace surfint
