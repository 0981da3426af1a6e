#include "surfint/forms.hpp"

#include <algorithm>
#include <array>

namespace surfint {

namespace {

constexpr const char* kModule = "femforms";

struct LocalMatrices {
  std::array<double, 9> K{};
  std::array<double, 9> M{};
};

LocalMatrices element_matrices(const Mesh& m, const Triangle& t, Weight w) {
  std::array<Point, 3> p;
  for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] = m.nodes[static_cast<std::size_t>(t.v[static_cast<std::size_t>(k)])];
  const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
  // Gradient of phi_k is (b_k, c_k) / (2 area).
  std::array<double, 3> b{}, c{};
  for (std::size_t k = 0; k < 3; ++k) {
    const Point& q = p[(k + 1) % 3];
    const Point& r = p[(k + 2) % 3];
    b[k] = q.y - r.y;
    c[k] = r.x - q.x;
  }
  LocalMatrices L;
  const bool radial = w == Weight::Radial;
  const std::array<double, 3> r{p[0].x, p[1].x, p[2].x};
  const double rbar = radial ? (r[0] + r[1] + r[2]) / 3.0 : 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      L.K[3 * i + j] = rbar * (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
      if (!radial) {
        L.M[3 * i + j] = area / 12.0 * (i == j ? 2.0 : 1.0);
      } else if (i == j) {
        L.M[3 * i + j] = area / 10.0 * r[i] + area / 30.0 * (r[(i + 1) % 3] + r[(i + 2) % 3]);
      } else {
        const std::size_t k = 3 - i - j;
        L.M[3 * i + j] = area / 30.0 * (r[i] + r[j]) + area / 60.0 * r[k];
      }
    }
  }
  return L;
}

struct VolumeTriplets {
  std::vector<Triplet> K;
  std::vector<Triplet> M;
};

// Every element owns nine fixed slots, so the parallel fill writes the same
// sequence as the serial loop and the merged matrices are bit-identical.
VolumeTriplets volume_triplets(const Mesh& m, const DofMap& d, Weight w, Execution ex) {
  const auto nt = static_cast<std::ptrdiff_t>(m.triangles.size());
  VolumeTriplets out;
  out.K.assign(static_cast<std::size_t>(nt) * 9, Triplet{-1, -1, 0.0});
  out.M.assign(static_cast<std::size_t>(nt) * 9, Triplet{-1, -1, 0.0});
  auto fill = [&](std::ptrdiff_t e) {
    const Triangle& t = m.triangles[static_cast<std::size_t>(e)];
    const LocalMatrices L = element_matrices(m, t, w);
    std::array<int, 3> dof{};
    for (std::size_t k = 0; k < 3; ++k) dof[k] = d.dof(t.v[k], t.region);
    for (std::size_t i = 0; i < 3; ++i) {
      if (dof[i] < 0) continue;
      for (std::size_t j = 0; j < 3; ++j) {
        if (dof[j] < 0) continue;
        const std::size_t slot = static_cast<std::size_t>(e) * 9 + 3 * i + j;
        out.K[slot] = {dof[i], dof[j], L.K[3 * i + j]};
        out.M[slot] = {dof[i], dof[j], L.M[3 * i + j]};
      }
    }
  };
  if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < nt; ++e) fill(e);
  } else {
    for (std::ptrdiff_t e = 0; e < nt; ++e) fill(e);
  }
  auto unused = [](const Triplet& t) { return t.row < 0; };
  std::erase_if(out.K, unused);
  std::erase_if(out.M, unused);
  return out;
}

std::vector<double> edge_values(const Mesh& m, const std::vector<double>& per_segment,
                                const std::optional<std::vector<double>>& per_edge, const char* name) {
  if (per_edge) {
    if (per_edge->size() != m.interface_edges.size()) {
      throw SizeError(kModule, std::string("per-edge ") + name + " needs one value per interface edge");
    }
    return *per_edge;
  }
  std::vector<double> v;
  v.reserve(m.interface_edges.size());
  for (const auto& e : m.interface_edges) {
    if (e.segment < 0 || static_cast<std::size_t>(e.segment) >= per_segment.size()) {
      throw SizeError(kModule, std::string("no ") + name + " value for interface segment " + std::to_string(e.segment));
    }
    v.push_back(per_segment[static_cast<std::size_t>(e.segment)]);
  }
  return v;
}

void require_size(std::size_t got, const DofMap& d, const char* what) {
  if (got != d.size()) {
    throw SizeError(kModule, std::string(what) + ": vector has " + std::to_string(got) + " entries, expected " +
                                 std::to_string(d.size()));
  }
}

}  // namespace

const char* to_string(FormKind kind) { return kind == FormKind::Delta ? "delta" : "deltaprime"; }

AssembledForms assemble(const Mesh& m, const DofMap& cont, const DofMap& broken, const MaterialData& mat,
                        const AssembleOptions& opts) {
  if (cont.kind != DofKind::Continuous || broken.kind != DofKind::Broken) {
    throw DomainError(kModule, "assemble needs a continuous and a broken dof map");
  }
  if (cont.truncation_halfwidth != broken.truncation_halfwidth) {
    throw DomainError(kModule, "dof maps use different truncation boxes");
  }
  if (opts.weight == Weight::Radial && m.kind != GeometryKind::ConeMeridian) {
    throw DomainError(kModule, "radial weight is only defined on the cone meridian plane");
  }
  AssembledForms F;
  F.cont = cont;
  F.broken = broken;
  F.weight = opts.weight;
  F.edges = interface_quadrature(m, cont, broken);
  F.edge_alpha = edge_values(m, mat.alpha, opts.edge_alpha, "alpha");
  F.edge_beta = edge_values(m, mat.beta, opts.edge_beta, "beta");
  for (std::size_t i = 0; i < F.edges.size(); ++i) {
    if (!(F.edge_alpha[i] >= 0.0)) throw DomainError(kModule, "alpha must be non-negative");
    if (!(F.edge_beta[i] > 0.0)) throw DomainError(kModule, "beta must be positive");
  }

  const int nc = cont.n_dofs;
  const int nb = broken.n_dofs;
  auto vc = volume_triplets(m, cont, opts.weight, opts.execution);
  auto vb = volume_triplets(m, broken, opts.weight, opts.execution);
  F.K_cont = CsrMatrix::from_triplets(nc, nc, std::move(vc.K));
  F.M_cont = CsrMatrix::from_triplets(nc, nc, std::move(vc.M));
  F.K_brok = CsrMatrix::from_triplets(nb, nb, std::move(vb.K));
  F.M_brok = CsrMatrix::from_triplets(nb, nb, std::move(vb.M));

  const bool radial = opts.weight == Weight::Radial;
  std::vector<Triplet> T, J;
  T.reserve(4 * F.edges.size());
  J.reserve(16 * F.edges.size());
  for (std::size_t e = 0; e < F.edges.size(); ++e) {
    const auto& q = F.edges[e];
    const auto mm = q.mass(radial);
    const double a = F.edge_alpha[e];
    const double s = 1.0 / F.edge_beta[e];
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double v = mm[2 * i + j];
        if (q.cont[i] >= 0 && q.cont[j] >= 0) T.push_back({q.cont[i], q.cont[j], a * v});
        // Jump basis: +phi on the Omega1 copy, -phi on the Omega2 copy.
        const std::array<std::pair<int, double>, 2> ui{{{q.side1[i], 1.0}, {q.side2[i], -1.0}}};
        const std::array<std::pair<int, double>, 2> uj{{{q.side1[j], 1.0}, {q.side2[j], -1.0}}};
        for (const auto& [di, si] : ui) {
          for (const auto& [dj, sj] : uj) {
            if (di >= 0 && dj >= 0) J.push_back({di, dj, si * sj * s * v});
          }
        }
      }
    }
  }
  F.T_alpha = CsrMatrix::from_triplets(nc, nc, std::move(T));
  F.J_beta = CsrMatrix::from_triplets(nb, nb, std::move(J));
  return F;
}

double form_value(const AssembledForms& F, FormKind which, std::span<const double> u) {
  if (which == FormKind::Delta) {
    require_size(u.size(), F.cont, "form_value(delta)");
    return F.K_cont.quadratic(u) - F.T_alpha.quadratic(u);
  }
  require_size(u.size(), F.broken, "form_value(deltaprime)");
  return F.K_brok.quadratic(u) - F.J_beta.quadratic(u);
}

std::vector<double> embed(const AssembledForms& F, std::span<const double> u_cont) {
  require_size(u_cont.size(), F.cont, "embed");
  std::vector<double> out(F.broken.size());
  for (std::size_t d = 0; d < out.size(); ++d) {
    const int node = F.broken.dof_node[d];
    out[d] = u_cont[static_cast<std::size_t>(F.cont.node_dof1[static_cast<std::size_t>(node)])];
  }
  return out;
}

std::vector<double> apply_U(const AssembledForms& F, std::span<const double> u_brok) {
  require_size(u_brok.size(), F.broken, "apply_U");
  std::vector<double> out(u_brok.begin(), u_brok.end());
  for (std::size_t d = 0; d < out.size(); ++d) {
    if (F.broken.dof_side[d] == Side::Omega2) out[d] = -out[d];
  }
  return out;
}

double borderline_identity_check(const AssembledForms& F, std::span<const double> u_cont) {
  const auto w = apply_U(F, embed(F, u_cont));
  return form_value(F, FormKind::DeltaPrime, w) - form_value(F, FormKind::Delta, u_cont);
}

}  // namespace surfint
