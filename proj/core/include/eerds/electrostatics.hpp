#pragma once

#include <optional>
#include <vector>

#include "eerds/linalg.hpp"
#include "eerds/mesh.hpp"

namespace eerds {

/// Data of the Poisson problem -div(eps grad psi) = rho with the mesh's
/// Dirichlet/Robin/Neumann boundary conditions. g_left/g_right are surface
/// charges entering the Robin condition eps d_nu psi + omega psi = g.
struct PoissonProblem {
  MeshHandle mesh;
  Field epsilon;
  Field doping;
  double g_left = 0.0;
  double g_right = 0.0;
};

/// Stiffness-plus-Robin form of the potential space, with constraint
/// bookkeeping (Dirichlet elimination / zero-mean pinning) and a reusable
/// factorization. Immutable after assembly; concurrent solves are safe.
class AssembledOperator {
 public:
  const MeshHandle& mesh() const { return mesh_; }
  BoundaryCase classification() const { return mesh_->classification(); }

  /// Bilinear form B(f,g) = int eps f' g' dx + sum_Robin omega f g.
  double bilinear(const Field& f, const Field& g) const;
  double quadratic(const Field& f) const { return bilinear(f, f); }

  /// Dual (load) vector L f of a nodal field, no constraints applied.
  std::vector<double> apply(const Field& f) const;

  /// Lumped load vector of a volume density.
  std::vector<double> density_load(const Field& rho) const;
  /// Load of volume doping plus Robin endpoint surface charges.
  std::vector<double> external_load(const Field& doping, double g_left,
                                    double g_right) const;

  /// Solves L psi = load in the constrained space (Dirichlet zeros or zero
  /// mean). Pure Neumann loads must be compatible: |sum load| <= 1e-10 * |load|_1.
  Field solve_load(const std::vector<double>& load) const;

  /// Energy seminorm of a load: sqrt(load . L^{-1} load).
  double dual_norm_of_load(const std::vector<double>& load) const;

  bool is_dirichlet_node(int j) const { return dirichlet_[j] != 0; }

  /// Unconstrained tridiagonal matrix of the form.
  const SymTridiagonal& matrix() const { return full_; }

  friend AssembledOperator assemble(const PoissonProblem& problem);

 private:
  MeshHandle mesh_;
  SymTridiagonal full_;           // unconstrained operator
  SymTridiagonal factored_;       // constrained block, LDL^T
  std::vector<char> dirichlet_;
  int free_lo_ = 0, free_hi_ = 0;  // inclusive free-node range
  bool pinned_ = false;            // pure Neumann: node 0 pinned, mean removed
};

AssembledOperator assemble(const PoissonProblem& problem);

/// Weak solution of L psi = rho (volume density).
Field solve_internal_potential(const AssembledOperator& op, const Field& rho);

/// Weak solution with doping + boundary surface-charge data.
Field solve_external_potential(const AssembledOperator& op, const Field& doping,
                               double g_left, double g_right);

/// E(rho, psi_ext) = 1/2 B(psi_rho + psi_ext). The equivalent three-term
/// expansion is evaluated as a consistency check.
double electrostatic_energy(const AssembledOperator& op, const Field& rho,
                            const Field& psi_ext);

struct MinimalEnergy {
  double value = 0.0;
  std::optional<double> kappa_star;  // only in the pure Robin case
};

/// Least electrostatic energy over charge distributions of total charge Q0.
/// Zero when a Dirichlet part is present or in the (compatible) pure Neumann
/// case; closed form with the optimal boundary level kappa* for pure Robin.
MinimalEnergy min_electro_energy(const AssembledOperator& op, double Q0,
                                 const Field& psi_ext);

/// Total energy E = 1/2 B(psi_{q.c} + psi_ext) + int u and charge Q = int q.c.
double total_energy(const AssembledOperator& op, const SpeciesField& c,
                    const Field& u, const Field& psi_ext);
double total_charge(const SpeciesField& c);

/// Unit-mass density supported within distance (x_R - x_L)/n of a Dirichlet
/// endpoint (control-volume exact averages, so the integral is exactly 1).
Field dirichlet_charge_concentration(const MeshHandle& mesh, int n);

}  // namespace eerds
