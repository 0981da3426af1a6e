// Constrained Delaunay triangulation with Ruppert refinement.
//
// The box, the nested truncation boxes and the interface form a planar
// straight-line graph. Its vertices are inserted into a super triangle with
// Bowyer-Watson, segments are recovered by midpoint splitting, and the
// triangulation is refined by inserting circumcenters of bad triangles while
// splitting every subsegment that a new vertex would encroach. Subsegments
// adjacent to an input vertex are split on concentric shells (powers of two
// from that vertex) so that small input angles do not cause endless splitting.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "surfint/mesh.hpp"

namespace surfint {

namespace {

using Real = long double;

Real orient(Point a, Point b, Point c) {
  return (Real(b.x) - a.x) * (Real(c.y) - a.y) - (Real(b.y) - a.y) * (Real(c.x) - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the counter-clockwise triangle abc.
Real incircle(Point a, Point b, Point c, Point d) {
  const Real adx = Real(a.x) - d.x, ady = Real(a.y) - d.y;
  const Real bdx = Real(b.x) - d.x, bdy = Real(b.y) - d.y;
  const Real cdx = Real(c.x) - d.x, cdy = Real(c.y) - d.y;
  const Real ad = adx * adx + ady * ady;
  const Real bd = bdx * bdx + bdy * bdy;
  const Real cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Point circumcenter(Point a, Point b, Point c) {
  const Real bx = Real(b.x) - a.x, by = Real(b.y) - a.y;
  const Real cx = Real(c.x) - a.x, cy = Real(c.y) - a.y;
  const Real d = 2 * (bx * cy - by * cx);
  const Real b2 = bx * bx + by * by;
  const Real c2 = cx * cx + cy * cy;
  const Real ux = (cy * b2 - by * c2) / d;
  const Real uy = (bx * c2 - cx * b2) / d;
  return {static_cast<double>(a.x + ux), static_cast<double>(a.y + uy)};
}

enum class SegKind : std::uint8_t { Boundary, Interface, Auxiliary };

struct SegInfo {
  SegKind kind = SegKind::Auxiliary;
  int id = -1;
};

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

int key_lo(std::uint64_t k) { return static_cast<int>(k >> 32); }
int key_hi(std::uint64_t k) { return static_cast<int>(k & 0xffffffffu); }

struct RawSegment {
  Point a;
  Point b;
  SegInfo info;
};

struct Piece {
  int a = -1;
  int b = -1;
  SegInfo info;
};

int precedence(SegKind k) {
  switch (k) {
    case SegKind::Boundary: return 2;
    case SegKind::Interface: return 1;
    case SegKind::Auxiliary: return 0;
  }
  return 0;
}

double angle_at(Point p, Point q, Point r) {
  const Point u = q - p;
  const Point v = r - p;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

class Triangulator {
 public:
  Triangulator(const InterfaceGeometry& g, const TriangulateOptions& o) : g_(g), opts_(o) {
    tol_ = 1e-10 * g.box_halfwidth;
    min_angle_ = o.min_angle_deg * std::numbers::pi / 180.0;
  }

  Mesh run() {
    build_pslg();
    make_super_triangle();
    for (std::size_t i = 0; i < pslg_vertices_.size(); ++i) {
      insert_free_point(pslg_vertices_[i], /*input=*/true);
    }
    for (const auto& piece : pieces_) recover(piece.a + 3, piece.b + 3, piece.info, 0);
    refine();
    return extract();
  }

 private:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{};   // n[i] is across the edge opposite v[i]
    bool alive = true;
  };

  struct BoundaryEdge {
    int u, w, outer, from;
  };

  struct BadEntry {
    int tri;
    std::array<int, 3> v;
  };

  struct SegEntry {
    std::uint64_t key;
    bool forced;
  };

  // ---- planar straight-line graph -------------------------------------------------

  int add_pslg_vertex(Point p) {
    for (std::size_t i = 0; i < pslg_vertices_.size(); ++i) {
      if (distance(pslg_vertices_[i], p) <= tol_) return static_cast<int>(i);
    }
    pslg_vertices_.push_back(p);
    return static_cast<int>(pslg_vertices_.size() - 1);
  }

  void add_rect(std::vector<RawSegment>& raw, const Rect& r, SegKind kind) {
    const Point c0{r.xmin, r.ymin}, c1{r.xmax, r.ymin}, c2{r.xmax, r.ymax}, c3{r.xmin, r.ymax};
    raw.push_back({c0, c1, {kind, -1}});
    raw.push_back({c1, c2, {kind, -1}});
    raw.push_back({c2, c3, {kind, -1}});
    raw.push_back({c3, c0, {kind, -1}});
  }

  void build_pslg() {
    std::vector<RawSegment> raw;
    add_rect(raw, g_.box, SegKind::Boundary);
    for (double L : opts_.nested_halfwidths) {
      if (L >= g_.box_halfwidth - tol_) continue;
      add_rect(raw, truncation_box(g_.kind, L), SegKind::Auxiliary);
    }
    for (std::size_t i = 0; i < g_.segments.size(); ++i) {
      raw.push_back({g_.segments[i].a, g_.segments[i].b, {SegKind::Interface, static_cast<int>(i)}});
    }
    for (const auto& s : raw) {
      add_pslg_vertex(s.a);
      add_pslg_vertex(s.b);
    }
    // Proper crossings between segments become vertices.
    for (std::size_t i = 0; i < raw.size(); ++i) {
      for (std::size_t j = i + 1; j < raw.size(); ++j) {
        const Point d1 = raw[i].b - raw[i].a;
        const Point d2 = raw[j].b - raw[j].a;
        const double den = cross(d1, d2);
        if (std::abs(den) <= 1e-14 * norm(d1) * norm(d2)) continue;
        const double t = cross(raw[j].a - raw[i].a, d2) / den;
        const double u = cross(raw[j].a - raw[i].a, d1) / den;
        const double et = tol_ / norm(d1);
        const double eu = tol_ / norm(d2);
        if (t > et && t < 1 - et && u > eu && u < 1 - eu) add_pslg_vertex(raw[i].a + t * d1);
      }
    }
    // Split each segment at every vertex lying on it, then merge duplicates.
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (const auto& s : raw) {
      const Point d = s.b - s.a;
      const double len2 = dot(d, d);
      std::vector<std::pair<double, int>> on;
      for (std::size_t k = 0; k < pslg_vertices_.size(); ++k) {
        const Point p = pslg_vertices_[k];
        const double t = dot(p - s.a, d) / len2;
        if (t < -1e-12 || t > 1 + 1e-12) continue;
        if (distance(p, s.a + t * d) <= tol_) on.emplace_back(t, static_cast<int>(k));
      }
      std::sort(on.begin(), on.end());
      for (std::size_t k = 0; k + 1 < on.size(); ++k) {
        const int a = on[k].second;
        const int b = on[k + 1].second;
        if (a == b) continue;
        const auto key = edge_key(a, b);
        auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(key, pieces_.size());
          pieces_.push_back({a, b, s.info});
        } else if (precedence(s.info.kind) > precedence(pieces_[it->second].info.kind)) {
          pieces_[it->second].info = s.info;
        }
      }
    }
  }

  // ---- triangulation primitives ------------------------------------------------------

  void make_super_triangle() {
    const Rect& b = g_.box;
    const Point c{0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
    const double d = 20.0 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
    pts_ = {Point{c.x - 3 * d, c.y - 2 * d}, Point{c.x + 3 * d, c.y - 2 * d}, Point{c.x, c.y + 3 * d}};
    input_ = {0, 0, 0};
    vtri_ = {0, 0, 0};
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    mark_.push_back(0);
  }

  bool contains(int t, Point p) const {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    return orient(pts_[v[0]], pts_[v[1]], p) >= 0 && orient(pts_[v[1]], pts_[v[2]], p) >= 0 &&
           orient(pts_[v[2]], pts_[v[0]], p) >= 0;
  }

  int locate(Point p, int start) {
    if (start < 0 || !tris_[static_cast<std::size_t>(start)].alive) start = last_tri_;
    if (start < 0 || !tris_[static_cast<std::size_t>(start)].alive) start = any_alive();
    int cur = start;
    const std::size_t cap = 4 * tris_.size() + 100;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& t = tris_[static_cast<std::size_t>(cur)];
      const int r = static_cast<int>(rng_() % 3);
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (r + k) % 3;
        if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) < 0) {
          next = t.n[i];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive && contains(static_cast<int>(i), p)) return static_cast<int>(i);
    }
    throw MeshError("point location failed");
  }

  int any_alive() const {
    for (std::size_t i = 0; i < tris_.size(); ++i)
      if (tris_[i].alive) return static_cast<int>(i);
    return -1;
  }

  // Walks along the straight line from the centroid of `start` towards p.
  // Returns the triangle containing p, or the constrained edge that blocks the way.
  std::pair<int, std::uint64_t> walk_to(int start, Point p) {
    const Tri& t0 = tris_[static_cast<std::size_t>(start)];
    const Point s = (1.0 / 3.0) * (pts_[t0.v[0]] + pts_[t0.v[1]] + pts_[t0.v[2]]);
    int cur = start;
    const std::size_t cap = 4 * tris_.size() + 100;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& t = tris_[static_cast<std::size_t>(cur)];
      int exit = -1;
      int fallback = -1;
      for (int i = 0; i < 3; ++i) {
        const Point a = pts_[t.v[(i + 1) % 3]];
        const Point b = pts_[t.v[(i + 2) % 3]];
        if (orient(a, b, p) >= 0) continue;
        if (fallback < 0) fallback = i;
        const Real sa = orient(s, p, a);
        const Real sb = orient(s, p, b);
        if ((sa >= 0 && sb <= 0) || (sa <= 0 && sb >= 0)) {
          exit = i;
          break;
        }
      }
      if (exit < 0) exit = fallback;
      if (exit < 0) return {cur, 0};
      const int a = t.v[(exit + 1) % 3];
      const int b = t.v[(exit + 2) % 3];
      const auto key = edge_key(a, b);
      if (cons_.count(key) || t.n[exit] < 0) return {-1, key};
      cur = t.n[exit];
    }
    return {locate(p, start), 0};
  }

  // Triangle and local index i such that edge (a, b) is opposite v[i].
  std::pair<int, int> find_edge(int a, int b) const {
    const int start = vtri_[static_cast<std::size_t>(a)];
    int cur = start;
    for (int guard = 0; guard < 1000; ++guard) {
      const Tri& t = tris_[static_cast<std::size_t>(cur)];
      int ia = -1;
      for (int k = 0; k < 3; ++k)
        if (t.v[k] == a) ia = k;
      if (ia < 0) break;
      for (int k = 0; k < 3; ++k) {
        if (t.v[k] == b) return {cur, 3 - ia - k};
      }
      // rotate around a across the edge (a, v[ia+1]), i.e. opposite v[ia+2]
      const int next = t.n[(ia + 2) % 3];
      if (next < 0 || next == start) break;
      cur = next;
    }
    // Rare fallback: exhaustive scan.
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& t = tris_[i];
      if (!t.alive) continue;
      int ia = -1, ib = -1;
      for (int k = 0; k < 3; ++k) {
        if (t.v[k] == a) ia = k;
        if (t.v[k] == b) ib = k;
      }
      if (ia >= 0 && ib >= 0) return {static_cast<int>(i), 3 - ia - ib};
    }
    return {-1, -1};
  }

  bool in_cavity(int t) const { return mark_[static_cast<std::size_t>(t)] == stamp_; }

  // Bowyer-Watson cavity of p grown from the seeds without crossing constrained edges.
  // Returns false when p lies on a constrained edge of a seed.
  bool collect_cavity(Point p, const std::vector<int>& seeds) {
    std::vector<int> excluded;
    for (int attempt = 0; attempt < 64; ++attempt) {
      ++stamp_;
      cavity_.clear();
      for (int s : seeds) {
        mark_[static_cast<std::size_t>(s)] = stamp_;
        cavity_.push_back(s);
      }
      for (std::size_t q = 0; q < cavity_.size(); ++q) {
        const Tri& t = tris_[static_cast<std::size_t>(cavity_[q])];
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb < 0 || in_cavity(nb)) continue;
          if (std::find(excluded.begin(), excluded.end(), nb) != excluded.end()) continue;
          if (cons_.count(edge_key(t.v[(i + 1) % 3], t.v[(i + 2) % 3]))) continue;
          const Tri& o = tris_[static_cast<std::size_t>(nb)];
          if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0) {
            mark_[static_cast<std::size_t>(nb)] = stamp_;
            cavity_.push_back(nb);
          }
        }
      }
      // The cavity must be star-shaped with respect to p.
      bool ok = true;
      for (int c : cavity_) {
        const Tri& t = tris_[static_cast<std::size_t>(c)];
        for (int i = 0; i < 3 && ok; ++i) {
          const int nb = t.n[i];
          if (nb >= 0 && in_cavity(nb)) continue;
          const int u = t.v[(i + 1) % 3];
          const int w = t.v[(i + 2) % 3];
          if (orient(pts_[u], pts_[w], p) > 0) continue;
          ok = false;
          if (std::find(seeds.begin(), seeds.end(), c) == seeds.end()) {
            excluded.push_back(c);
          } else if (nb >= 0 && !cons_.count(edge_key(u, w))) {
            // p sits on an unconstrained edge of a seed: take the neighbour too.
            std::vector<int> more = seeds;
            more.push_back(nb);
            return collect_cavity(p, more);
          } else {
            return false;
          }
        }
        if (!ok) break;
      }
      if (ok) return true;
    }
    throw MeshError("could not form a star-shaped insertion cavity");
  }

  void cavity_or_throw(Point p, const std::vector<int>& seeds) {
    if (!collect_cavity(p, seeds)) throw MeshError("degenerate insertion on a constrained edge");
  }

  int alloc_tri() {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      return t;
    }
    tris_.push_back({});
    mark_.push_back(0);
    return static_cast<int>(tris_.size() - 1);
  }

  // Inserts p, replacing the current cavity_. Returns the new vertex id.
  int fill_cavity(Point p, bool input) {
    const int pid = static_cast<int>(pts_.size());
    pts_.push_back(p);
    input_.push_back(input ? 1 : 0);
    vtri_.push_back(-1);

    std::vector<BoundaryEdge> border;
    std::vector<int> outer_slot;
    for (int c : cavity_) {
      const Tri& t = tris_[static_cast<std::size_t>(c)];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (nb >= 0 && in_cavity(nb)) continue;
        border.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb, c});
        int slot = -1;
        if (nb >= 0) {
          const Tri& o = tris_[static_cast<std::size_t>(nb)];
          for (int k = 0; k < 3; ++k)
            if (o.n[k] == c) slot = k;
        }
        outer_slot.push_back(slot);
      }
    }
    for (int c : cavity_) {
      tris_[static_cast<std::size_t>(c)].alive = false;
      free_.push_back(c);
    }
    new_tris_.clear();
    for (std::size_t e = 0; e < border.size(); ++e) {
      const int id = alloc_tri();
      Tri& t = tris_[static_cast<std::size_t>(id)];
      t.v = {border[e].u, border[e].w, pid};
      t.n = {-1, -1, border[e].outer};
      t.alive = true;
      mark_[static_cast<std::size_t>(id)] = 0;
      if (border[e].outer >= 0) tris_[static_cast<std::size_t>(border[e].outer)].n[outer_slot[e]] = id;
      new_tris_.push_back(id);
    }
    for (std::size_t e = 0; e < border.size(); ++e) {
      Tri& t = tris_[static_cast<std::size_t>(new_tris_[e])];
      for (std::size_t f = 0; f < border.size(); ++f) {
        if (border[f].u == border[e].w) t.n[0] = new_tris_[f];
        if (border[f].w == border[e].u) t.n[1] = new_tris_[f];
      }
      for (int k = 0; k < 3; ++k) vtri_[static_cast<std::size_t>(t.v[k])] = new_tris_[e];
    }
    last_tri_ = new_tris_.front();
    return pid;
  }

  int insert_free_point(Point p, bool input) {
    const int t = locate(p, last_tri_);
    cavity_or_throw(p, {t});
    return fill_cavity(p, input);
  }

  int split_segment(std::uint64_t key) {
    const int a = key_lo(key);
    const int b = key_hi(key);
    const SegInfo info = cons_.at(key);
    const Point pa = pts_[static_cast<std::size_t>(a)];
    const Point pb = pts_[static_cast<std::size_t>(b)];
    const double len = distance(pa, pb);
    double t = 0.5;
    // Concentric shells around input vertices.
    const bool ia = input_[static_cast<std::size_t>(a)] != 0;
    const bool ib = input_[static_cast<std::size_t>(b)] != 0;
    if (ia != ib) {
      const double shell = std::exp2(std::round(std::log2(0.5 * len)));
      const double frac = shell / len;
      if (frac > 0.25 && frac < 0.75) t = ia ? frac : 1.0 - frac;
    }
    const Point p = pa + t * (pb - pa);
    const auto [tri, idx] = find_edge(a, b);
    if (tri < 0) throw MeshError("constrained edge vanished from the triangulation");
    std::vector<int> seeds{tri};
    const int nb = tris_[static_cast<std::size_t>(tri)].n[idx];
    if (nb >= 0) seeds.push_back(nb);
    cons_.erase(key);
    cavity_or_throw(p, seeds);
    const int pid = fill_cavity(p, false);
    cons_.emplace(edge_key(a, pid), info);
    cons_.emplace(edge_key(pid, b), info);
    return pid;
  }

  void recover(int a, int b, SegInfo info, int depth) {
    if (find_edge(a, b).first >= 0) {
      cons_.emplace(edge_key(a, b), info);
      return;
    }
    if (depth > 60) throw MeshError("segment recovery did not converge");
    const Point m = 0.5 * (pts_[static_cast<std::size_t>(a)] + pts_[static_cast<std::size_t>(b)]);
    const int start = vtri_[static_cast<std::size_t>(a)];
    const int t = locate(m, start);
    cavity_or_throw(m, {t});
    const int mid = fill_cavity(m, false);
    recover(a, mid, info, depth + 1);
    recover(mid, b, info, depth + 1);
  }

  // ---- quality -----------------------------------------------------------------------

  bool interior(int t) const {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    if (v[0] < 3 || v[1] < 3 || v[2] < 3) return false;
    const Point c = (1.0 / 3.0) * (pts_[v[0]] + pts_[v[1]] + pts_[v[2]]);
    return g_.box.contains(c);
  }

  double local_size(Point c) const {
    if (opts_.grade_apexes) {
      for (const Point& apex : g_.apexes) {
        if (distance(c, apex) < opts_.h_target) return 0.5 * opts_.h_target;
      }
    }
    return opts_.h_target;
  }

  bool bad(int t) const {
    if (!interior(t)) return false;
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    const Point p0 = pts_[v[0]], p1 = pts_[v[1]], p2 = pts_[v[2]];
    const Point c = (1.0 / 3.0) * (p0 + p1 + p2);
    const double h = local_size(c);
    if (distance(p0, p1) > h || distance(p1, p2) > h || distance(p2, p0) > h) return true;
    const std::array<double, 3> ang{angle_at(p0, p1, p2), angle_at(p1, p2, p0), angle_at(p2, p0, p1)};
    const int k = static_cast<int>(std::min_element(ang.begin(), ang.end()) - ang.begin());
    if (ang[static_cast<std::size_t>(k)] >= min_angle_) return false;
    // A small angle between two input segments meeting at an input vertex cannot be fixed.
    const int apex = v[static_cast<std::size_t>(k)];
    if (input_[static_cast<std::size_t>(apex)] && cons_.count(edge_key(apex, v[(k + 1) % 3])) &&
        cons_.count(edge_key(apex, v[(k + 2) % 3]))) {
      return false;
    }
    return true;
  }

  bool encroached_by(std::uint64_t key, Point p) const {
    const Point a = pts_[static_cast<std::size_t>(key_lo(key))];
    const Point b = pts_[static_cast<std::size_t>(key_hi(key))];
    return dot(a - p, b - p) < -1e-12 * dot(b - a, b - a);
  }

  bool encroached(std::uint64_t key) const {
    const auto [tri, idx] = find_edge(key_lo(key), key_hi(key));
    if (tri < 0) return false;
    const Tri& t = tris_[static_cast<std::size_t>(tri)];
    if (interior(tri) && encroached_by(key, pts_[static_cast<std::size_t>(t.v[idx])])) return true;
    const int nb = t.n[idx];
    if (nb < 0 || !interior(nb)) return false;
    const Tri& o = tris_[static_cast<std::size_t>(nb)];
    for (int k = 0; k < 3; ++k) {
      const int v = o.v[k];
      if (v != key_lo(key) && v != key_hi(key)) return encroached_by(key, pts_[static_cast<std::size_t>(v)]);
    }
    return false;
  }

  void queue_new_triangles() {
    for (int t : new_tris_) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      if (bad(t)) badq_.push_back({t, tri.v});
      for (int i = 0; i < 3; ++i) {
        const auto key = edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
        if (cons_.count(key) && encroached(key)) segq_.push_back({key, false});
      }
    }
  }

  void check_budget() const {
    if (pts_.size() <= opts_.max_vertices) return;
    double worst = 180.0;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (!tris_[i].alive || !interior(static_cast<int>(i))) continue;
      const auto& v = tris_[i].v;
      const Point p0 = pts_[v[0]], p1 = pts_[v[1]], p2 = pts_[v[2]];
      worst = std::min({worst, angle_at(p0, p1, p2), angle_at(p1, p2, p0), angle_at(p2, p0, p1)});
    }
    throw MeshError("refinement budget of " + std::to_string(opts_.max_vertices) +
                    " vertices exhausted; smallest angle reached " +
                    std::to_string(worst * 180.0 / std::numbers::pi) + " deg (target " +
                    std::to_string(opts_.min_angle_deg) + ")");
  }

  void refine() {
    for (const auto& [key, info] : sorted_constraints()) {
      if (encroached(key)) segq_.push_back({key, false});
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive && bad(static_cast<int>(i))) badq_.push_back({static_cast<int>(i), tris_[i].v});
    }
    while (true) {
      check_budget();
      if (!segq_.empty()) {
        const SegEntry e = segq_.front();
        segq_.pop_front();
        if (!cons_.count(e.key)) continue;
        if (!e.forced && !encroached(e.key)) continue;
        split_segment(e.key);
        queue_new_triangles();
        continue;
      }
      if (badq_.empty()) break;
      const BadEntry b = badq_.front();
      badq_.pop_front();
      const Tri& t = tris_[static_cast<std::size_t>(b.tri)];
      if (!t.alive || t.v != b.v || !bad(b.tri)) continue;
      const Point c = circumcenter(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]);
      const auto [host, blocker] = walk_to(b.tri, c);
      if (host < 0) {
        segq_.push_back({blocker, true});
        badq_.push_back(b);
        continue;
      }
      bool rejected = false;
      if (!collect_cavity(c, {host})) {
        const Tri& ht = tris_[static_cast<std::size_t>(host)];
        for (int i = 0; i < 3; ++i) {
          const auto key = edge_key(ht.v[(i + 1) % 3], ht.v[(i + 2) % 3]);
          if (cons_.count(key) && encroached_by(key, c)) segq_.push_back({key, true});
        }
        badq_.push_back(b);
        continue;
      }
      for (int ct : cavity_) {
        const Tri& ctri = tris_[static_cast<std::size_t>(ct)];
        for (int i = 0; i < 3; ++i) {
          const auto key = edge_key(ctri.v[(i + 1) % 3], ctri.v[(i + 2) % 3]);
          if (cons_.count(key) && encroached_by(key, c)) {
            segq_.push_back({key, true});
            rejected = true;
          }
        }
      }
      if (rejected) {
        badq_.push_back(b);
        continue;
      }
      fill_cavity(c, false);
      queue_new_triangles();
    }
  }

  std::vector<std::pair<std::uint64_t, SegInfo>> sorted_constraints() const {
    std::vector<std::pair<std::uint64_t, SegInfo>> out(cons_.begin(), cons_.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
  }

  // ---- output ------------------------------------------------------------------------

  Mesh extract() const {
    Mesh m;
    m.kind = g_.kind;
    m.box_halfwidth = g_.box_halfwidth;
    m.radial_weight = g_.radial_weight;
    m.nodes.assign(pts_.begin() + 3, pts_.end());

    std::vector<int> tri_index(tris_.size(), -1);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (!tris_[i].alive || !interior(static_cast<int>(i))) continue;
      tri_index[i] = static_cast<int>(kept.size());
      kept.push_back(i);
      Triangle t;
      for (int k = 0; k < 3; ++k) t.v[static_cast<std::size_t>(k)] = tris_[i].v[static_cast<std::size_t>(k)] - 3;
      m.triangles.push_back(t);
    }

    // Regions: components separated by interface edges, labelled by majority vote.
    std::vector<int> comp(kept.size(), -1);
    std::vector<int> component_vote;
    int ncomp = 0;
    for (std::size_t s = 0; s < kept.size(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = ncomp;
      int votes = 0;
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const Tri& t = tris_[kept[cur]];
        const Point c = (1.0 / 3.0) * (pts_[t.v[0]] + pts_[t.v[1]] + pts_[t.v[2]]);
        const Side side = classify_side(g_, c);
        votes += side == Side::Omega1 ? 1 : (side == Side::Omega2 ? -1 : 0);
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb < 0 || tri_index[static_cast<std::size_t>(nb)] < 0) continue;
          const auto it = cons_.find(edge_key(t.v[(i + 1) % 3], t.v[(i + 2) % 3]));
          if (it != cons_.end() && it->second.kind == SegKind::Interface) continue;
          const auto j = static_cast<std::size_t>(tri_index[static_cast<std::size_t>(nb)]);
          if (comp[j] < 0) {
            comp[j] = ncomp;
            stack.push_back(j);
          }
        }
      }
      component_vote.push_back(votes);
      ++ncomp;
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      m.triangles[i].region = component_vote[static_cast<std::size_t>(comp[i])] >= 0 ? Side::Omega1 : Side::Omega2;
    }

    // Interface edges, ordered along each geometry segment.
    std::vector<std::tuple<int, double, InterfaceEdge>> edges;
    for (const auto& [key, info] : sorted_constraints()) {
      if (info.kind != SegKind::Interface) continue;
      const auto& seg = g_.segments[static_cast<std::size_t>(info.id)];
      int a = key_lo(key) - 3;
      int b = key_hi(key) - 3;
      const Point d = seg.b - seg.a;
      double ta = dot(m.nodes[static_cast<std::size_t>(a)] - seg.a, d);
      double tb = dot(m.nodes[static_cast<std::size_t>(b)] - seg.a, d);
      if (ta > tb) {
        std::swap(a, b);
        std::swap(ta, tb);
      }
      InterfaceEdge e;
      e.a = a;
      e.b = b;
      e.segment = info.id;
      edges.emplace_back(info.id, ta, e);
    }
    std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
      return std::get<0>(x) != std::get<0>(y) ? std::get<0>(x) < std::get<0>(y) : std::get<1>(x) < std::get<1>(y);
    });
    for (const auto& e : edges) m.interface_edges.push_back(std::get<2>(e));

    std::vector<double> boxes = opts_.nested_halfwidths;
    boxes.push_back(g_.box_halfwidth);
    std::sort(boxes.begin(), boxes.end());
    boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
    boxes.erase(std::remove_if(boxes.begin(), boxes.end(), [&](double L) { return L > g_.box_halfwidth; }),
                boxes.end());
    m.truncation_halfwidths = boxes;
    m.rebuild_topology();
    return m;
  }

  const InterfaceGeometry& g_;
  TriangulateOptions opts_;
  double tol_ = 0.0;
  double min_angle_ = 0.0;

  std::vector<Point> pslg_vertices_;
  std::vector<Piece> pieces_;

  std::vector<Point> pts_;
  std::vector<char> input_;
  std::vector<int> vtri_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_tri_ = 0;
  std::vector<int> cavity_;
  std::vector<int> new_tris_;
  std::unordered_map<std::uint64_t, SegInfo> cons_;
  std::deque<SegEntry> segq_;
  std::deque<BadEntry> badq_;
  // Deterministic generator for the stochastic walk.
  struct Lcg {
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    std::uint64_t operator()() {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
      return s >> 33;
    }
  } rng_;
};

}  // namespace

Mesh triangulate(const InterfaceGeometry& g, const TriangulateOptions& opts) {
  if (!(opts.h_target > 0.0) || opts.h_target > g.box_halfwidth / 4.0) {
    throw DomainError("meshing", "h_target must lie in (0, L/4], got " + std::to_string(opts.h_target));
  }
  if (!(opts.min_angle_deg > 0.0) || opts.min_angle_deg > 33.0) {
    throw DomainError("meshing", "minimum angle must lie in (0, 33] degrees");
  }
  for (double L : opts.nested_halfwidths) {
    if (!(L > 0.0) || L > g.box_halfwidth) {
      throw DomainError("meshing", "nested box half-width " + std::to_string(L) + " outside (0, L]");
    }
  }
  Triangulator tri(g, opts);
  Mesh m = tri.run();
  const double worst = m.min_angle_deg();
  if (worst < opts.min_angle_deg - 1e-9) {
    throw MeshError("minimum angle " + std::to_string(worst) + " deg below the bound " +
                    std::to_string(opts.min_angle_deg) + " deg (small input angle?)");
  }
  if (opts.snap_circle_nodes) snap_circle_nodes(m, g);
  return m;
}

Mesh triangulate(const InterfaceGeometry& g, double h_target) {
  TriangulateOptions opts;
  opts.h_target = h_target;
  return triangulate(g, opts);
}

}  // namespace surfint
