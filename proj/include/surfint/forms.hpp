#pragma once

#include <optional>
#include <span>
#include <vector>

#include "surfint/mesh.hpp"
#include "surfint/sparse.hpp"

namespace surfint {

enum class FormKind { Delta, DeltaPrime };
enum class Weight { None, Radial };
enum class Execution { Parallel, Serial };

const char* to_string(FormKind kind);

struct AssembleOptions {
  Weight weight = Weight::None;
  Execution execution = Execution::Parallel;
  // Per-interface-edge strengths replacing the segment values (test hook).
  std::optional<std::vector<double>> edge_alpha;
  std::optional<std::vector<double>> edge_beta;
};

struct AssembledForms {
  DofMap cont;
  DofMap broken;
  Weight weight = Weight::None;
  std::vector<EdgeQuadrature> edges;
  std::vector<double> edge_alpha;
  std::vector<double> edge_beta;

  CsrMatrix K_cont;
  CsrMatrix M_cont;
  CsrMatrix T_alpha;
  CsrMatrix K_brok;
  CsrMatrix M_brok;
  CsrMatrix J_beta;

  CsrMatrix A_delta() const { return add(K_cont, 1.0, T_alpha, -1.0); }
  CsrMatrix A_deltaprime() const { return add(K_brok, 1.0, J_beta, -1.0); }
  const CsrMatrix& mass(FormKind kind) const { return kind == FormKind::Delta ? M_cont : M_brok; }
  const DofMap& dofs(FormKind kind) const { return kind == FormKind::Delta ? cont : broken; }
};

AssembledForms assemble(const Mesh& m, const DofMap& cont, const DofMap& broken, const MaterialData& mat,
                        const AssembleOptions& opts = {});

// u^T (K - T_alpha) u or u^T (K - J_beta) u.
double form_value(const AssembledForms& F, FormKind which, std::span<const double> u);

// Continuous coefficients copied onto both side copies of every cracked node.
std::vector<double> embed(const AssembledForms& F, std::span<const double> u_cont);

// Sign flip of every Omega2 dof.
std::vector<double> apply_U(const AssembledForms& F, std::span<const double> u_brok);

// a_deltaprime[U embed(u)] - a_delta[u]; zero up to rounding when beta = 4/alpha edgewise.
double borderline_identity_check(const AssembledForms& F, std::span<const double> u_cont);

}  // namespace surfint
