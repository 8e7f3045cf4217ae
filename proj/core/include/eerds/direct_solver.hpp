#pragma once

#include <functional>
#include <vector>

#include "eerds/dual_solver.hpp"
#include "eerds/electrostatics.hpp"
#include "eerds/entropy.hpp"
#include "eerds/mesh.hpp"

namespace eerds {

/// Nonnegative primal state of the constrained maximization.
struct PrimalState {
  SpeciesField c;
  Field u;
};

struct FeasibilityCertificate {
  PrimalState state;
  double energy_residual = 0.0;
  double charge_residual = 0.0;
};

struct DirectSolveOptions {
  double grad_tol = 1e-8;  // scaled by 1 + L2 norm of the entropy gradient
  int max_iterations = 50000;
};

struct DirectSolveReport {
  PrimalState state;
  bool converged = false;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  double multiplier_residual = 0.0;
  double eta = 0.0;    // least-squares multiplier for the energy constraint
  double kappa = 0.0;  // least-squares multiplier for the charge constraint
  double entropy = 0.0;
  double energy_residual = 0.0;
  double charge_residual = 0.0;
};

struct CrossValidationReport {
  double l1_gap_rel = 0.0;
  double linf_gap = 0.0;
  double entropy_gap_rel = 0.0;
  double dual_energy_residual = 0.0;
  double dual_charge_residual = 0.0;
  double primal_energy_residual = 0.0;
  double primal_charge_residual = 0.0;
  double l1_tolerance = 1e-3;
  double entropy_tolerance = 1e-6;
  bool pass = false;
};

/// Type-erased entropy callbacks so the primal route runs on any model of
/// the family (value on the closed cone, gradient/Hessian inside it).
struct EntropyOps {
  int species = 0;
  std::vector<double> charges;
  std::function<double(const std::vector<double>&)> value;  // H = -S, extended
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  std::function<std::vector<double>(const std::vector<double>&)> hessian;
  std::function<std::vector<double>(const std::vector<double>&, double)> prox;
  std::function<void(std::vector<double>&)> clip_to_domain;
};

EntropyOps make_entropy_ops(const BoltzmannEntropyModel& model);
EntropyOps make_entropy_ops(const SizeExclusionEntropyModel& model);

/// Primal route: feasible-point construction and constrained entropy ascent
/// with exact charge restoration and the constant-shift energy repair. Used
/// to cross-check the dual route on the same discrete functionals.
class DirectProblem {
 public:
  DirectProblem(EntropyOps ops, const AssembledOperator& op, Field psi_ext,
                double E0, double Q0);

  /// Minimal-energy charge profile split across species plus a constant
  /// internal energy filling the gap; exact constraints by construction.
  FeasibilityCertificate feasible_point() const;

  DirectSolveReport maximize(const PrimalState& start,
                             const DirectSolveOptions& opts = {}) const;

  /// Envelope-smoothed objective; no positivity constraint is needed and
  /// the multipliers are read off the stationarity condition.
  DirectSolveReport maximize_regularized(double delta, const PrimalState& start,
                                         const DirectSolveOptions& opts = {}) const;

  double entropy_total(const PrimalState& z) const;
  double energy_total(const PrimalState& z) const;
  double charge_total(const PrimalState& z) const;

  /// Midpoint of two feasible states with the energy gap pushed back into u.
  PrimalState repaired_midpoint(const PrimalState& a, const PrimalState& b) const;

  CrossValidationReport cross_validate(const EquilibriumResult& dual,
                                       const PrimalState& primal,
                                       double l1_tol = 1e-3,
                                       double entropy_tol = 1e-6) const;

  double minimal_energy() const { return V_; }
  const EntropyOps& ops() const { return ops_; }

 private:
  void repair_charge(PrimalState& z) const;
  void repair_energy(PrimalState& z) const;
  DirectSolveReport ascend(const PrimalState& start, const DirectSolveOptions& opts,
                           double delta) const;

  EntropyOps ops_;
  const AssembledOperator& op_;
  Field psi_ext_;
  double E0_, Q0_, V_;
  int pos_species_ = -1;  // species with the largest positive charge
  int neg_species_ = -1;  // species with the most negative charge
};

}  // namespace eerds
