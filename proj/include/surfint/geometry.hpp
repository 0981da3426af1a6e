#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surfint/common.hpp"

namespace surfint {

enum class GeometryKind { BrokenLine, Circle, LinePlusCircle, ConeMeridian };

const char* to_string(GeometryKind kind);
GeometryKind geometry_kind_from_string(const std::string& name);

// Axis-aligned computational box.
struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  bool contains(Point p, double tol = 0.0) const {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
  }
};

// A straight piece of the interaction support. Omega1 lies to the left of a -> b.
// Pieces that approximate a circle remember it so refinement can snap to the curve.
struct InterfaceSegment {
  Point a;
  Point b;
  int component = 0;
  bool on_circle = false;

  double length() const { return distance(a, b); }
  Point midpoint() const { return 0.5 * (a + b); }
  // Unit normal pointing into Omega1.
  Point normal() const {
    const Point d = b - a;
    const double l = norm(d);
    return {-d.y / l, d.x / l};
  }
};

struct InterfaceGeometry {
  GeometryKind kind = GeometryKind::BrokenLine;
  double theta = 0.0;           // BrokenLine, ConeMeridian
  double radius = 0.0;          // Circle, LinePlusCircle
  Point center;                 // Circle, LinePlusCircle
  double line_offset = 0.0;     // LinePlusCircle: height of the circle center above the line
  int n_chords = 0;             // Circle, LinePlusCircle
  double box_halfwidth = 0.0;   // L
  Rect box;
  std::vector<InterfaceSegment> segments;
  std::vector<Point> apexes;    // corner points of the support, graded by the mesher
  bool radial_weight = false;   // axisymmetric m = 0 meridian reduction

  double chord_error() const;   // max distance between the polygon and the true circle
  double interface_length() const;
  // True for segments on a non-compact component (lines and rays reaching the box).
  bool is_noncompact(std::size_t segment) const;
  bool has_compact_part() const;
  // Scale-aware tolerance used for on-interface and on-boundary decisions.
  double tolerance() const { return 1e-12 * box_halfwidth; }
};

InterfaceGeometry make_broken_line(double theta, double L);
InterfaceGeometry make_circle(double radius, Point center, double L, int n_chords);
InterfaceGeometry make_line_plus_circle(double h, double radius, double L, int n_chords);
InterfaceGeometry make_cone_meridian(double theta, double L);

// Same geometry family with a different box half-width.
InterfaceGeometry with_box_halfwidth(const InterfaceGeometry& g, double L);

// Box of half-width L for the geometry's kind ([0, L] x [-L, L] for the meridian plane).
Rect truncation_box(GeometryKind kind, double L);

// Points on the Dirichlet part of the box boundary of half-width L (or outside it).
// The symmetry axis r = 0 of the meridian plane is not Dirichlet.
bool is_dirichlet(GeometryKind kind, Point p, double L, double tol);

Side classify_side(const InterfaceGeometry& g, Point p);

// Piecewise-constant interaction strengths, one value per geometry segment.
struct MaterialData {
  std::vector<double> alpha;
  std::vector<double> beta;

  static MaterialData constant(const InterfaceGeometry& g, double alpha, double beta);
  // beta = 4 / alpha on every segment.
  static MaterialData borderline(const InterfaceGeometry& g, double alpha);

  void validate(const InterfaceGeometry& g) const;
  bool alpha_constant_on(const InterfaceGeometry& g, bool noncompact_only) const;
  bool beta_constant_on(const InterfaceGeometry& g, bool noncompact_only) const;
  // beta <= 4/alpha on every segment, up to a relative tolerance.
  bool below_borderline(double rel_tol = 1e-14) const;
  bool strictly_below_somewhere(double rel_tol = 1e-12) const;
};

}  // namespace surfint
