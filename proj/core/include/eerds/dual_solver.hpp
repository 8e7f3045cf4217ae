#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "eerds/electrostatics.hpp"
#include "eerds/entropy.hpp"
#include "eerds/mesh.hpp"

namespace eerds {

/// Multiplier triple of the convex dual objective: inverse temperature eta,
/// charge multiplier kappa, potential multiplier field lambda.
struct DualPoint {
  double eta = 1.0;
  double kappa = 0.0;
  Field lambda;
};

struct KGradient {
  double d_eta = 0.0;
  double d_kappa = 0.0;
  Field d_lambda;  // Riesz representative (density) of the lambda derivative
  double norm = 0.0;
};

struct EquilibriumDiagnostics {
  double energy_residual = 0.0;
  double charge_residual = 0.0;
  double theta_spread_rel = 0.0;
  double zeta_defect = 0.0;
  double poisson_residual_rel = 0.0;
};

/// Recovered constrained maximizer with its multipliers and residual report.
struct EquilibriumResult {
  SpeciesField c;
  Field u;
  Field Psi;  // total potential lambda / eta
  double eta = 0.0;
  double kappa = 0.0;
  double theta = 0.0;
  double entropy = 0.0;
  EquilibriumDiagnostics diagnostics;
};

struct DualSolveOptions {
  double grad_tol = 1e-8;  // scaled by 1 + |E0| + |Q0|
  int max_iterations = 200;
  bool record_trace = false;
};

struct DualIterationRecord {
  int iteration = 0;
  double k_value = 0.0;
  double gradient_norm = 0.0;
  double step_size = 0.0;
};

struct DualSolveReport {
  DualPoint point;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  double k_value = 0.0;
  std::vector<DualIterationRecord> trace;
};

/// Feasibility failure E0 <= V(Q0, psi_ext); carries the computed bound.
class InfeasibleScenario : public std::runtime_error {
 public:
  InfeasibleScenario(double E0, double V);
  double minimal_energy() const { return V_; }

 private:
  double V_;
};

/// Convex dual route: evaluates and minimizes
///   K(eta,kappa,lambda) = int Hbar(kappa+lambda, eta) + kappa Q0 + eta E0
///                         - B(lambda, psi_ext) + B(lambda,lambda)/(2 eta)
/// by damped Newton on (log eta, kappa, lambda), then recovers the
/// equilibrium state through the inverse gradient map. delta > 0 swaps in
/// the quadratically tilted integrand of the envelope family.
class DualProblem {
 public:
  DualProblem(const BoltzmannEntropyModel& model, const AssembledOperator& op,
              Field psi_ext, double E0, double Q0, double delta = 0.0);

  double k_value(const DualPoint& d) const;
  KGradient k_gradient(const DualPoint& d) const;

  DualPoint initial_point() const;
  DualSolveReport minimize(const DualPoint& initial,
                           const DualSolveOptions& opts = {}) const;

  /// Nodewise inverse map (c,u) = DH*(-(lambda+kappa) q, -eta), Psi = lambda/eta.
  EquilibriumResult recover(const DualPoint& d) const;
  EquilibriumDiagnostics verify(const EquilibriumResult& r) const;

  double minimal_energy() const { return V_; }
  double E0() const { return E0_; }
  double Q0() const { return Q0_; }
  double delta() const { return delta_; }
  const BoltzmannEntropyModel& model() const { return model_; }
  const AssembledOperator& op() const { return op_; }
  const Field& psi_ext() const { return psi_ext_; }

  /// Zero lambda in the constrained potential space.
  Field zero_lambda() const;

 private:
  void project(Field& lambda) const;
  double gradient_scale() const { return 1.0 + std::abs(E0_) + std::abs(Q0_); }

  const BoltzmannEntropyModel& model_;
  const AssembledOperator& op_;
  Field psi_ext_;
  double E0_, Q0_, delta_, V_;
};

}  // namespace eerds
