#pragma once

#include <utility>
#include <vector>

#include "eerds/direct_solver.hpp"
#include "eerds/dual_solver.hpp"
#include "eerds/electrostatics.hpp"
#include "eerds/entropy.hpp"
#include "eerds/mesh.hpp"

namespace eerds {

/// One reversible reaction pair sum alpha_i C_i <-> sum beta_i C_i.
struct Reaction {
  std::vector<int> alpha;
  std::vector<int> beta;
  double rate = 1.0;
};

/// Validated reaction set: every net stoichiometry conserves charge, and
/// optionally charge is the only conservation law (ker of the stoichiometric
/// matrix spanned by the charge vector).
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<Reaction> reactions, std::vector<double> charges,
                  bool require_single_conservation_law = false);

  int size() const { return static_cast<int>(reactions_.size()); }
  int species_count() const { return static_cast<int>(charges_.size()); }
  const Reaction& reaction(int r) const { return reactions_[r]; }
  const std::vector<double>& charges() const { return charges_; }
  int gamma(int r, int i) const {
    return reactions_[r].beta[i] - reactions_[r].alpha[i];
  }

 private:
  std::vector<Reaction> reactions_;
  std::vector<double> charges_;
};

/// Diagonal mobilities d_i(c,u) = d_i c_i and heat conductivity kappa u;
/// positive for positive states and vanishing at the cone boundary.
struct MobilityModel {
  std::vector<double> species_mobility;
  double heat_conductivity = 1.0;
};

enum class TimeScheme { SemiImplicit, Explicit };

struct StepResult {
  PrimalState state;
  double dt_used = 0.0;
  double entropy = 0.0;
  double energy = 0.0;
  double charge = 0.0;
  int halvings = 0;
};

struct EvolveOptions {
  double t_end = 10.0;
  double dt_initial = 1e-3;
  double dt_max = 0.05;
  double dt_min = 1e-12;
  double entropy_slack = 1e-10;
  double distance_tol = 0.0;  // 0 disables early termination
  int max_steps = 2000000;
  int snapshot_stride = 0;  // 0 disables snapshots
  TimeScheme scheme = TimeScheme::SemiImplicit;
};

struct Trajectory {
  std::vector<double> time;
  std::vector<double> entropy;
  std::vector<double> energy;
  std::vector<double> charge;
  std::vector<double> distance;  // empty when no reference is given
  std::vector<std::pair<double, PrimalState>> snapshots;
  bool reached_distance_tol = false;
  double min_entropy_increment = 0.0;
  double max_energy_drift_rel = 0.0;
  double max_charge_drift = 0.0;
  int steps = 0;
};

/// Dissipative evolution of (c, u) coupled to the quasi-static potential:
/// drift-diffusion fluxes driven by the entropy gradient and reversible
/// charge-conserving reactions with hyperbolic-sine kinetics. The
/// semi-implicit step conserves the discrete energy and charge to solver
/// precision and is accepted only when the entropy does not decrease beyond
/// the configured slack.
class EvolutionProblem {
 public:
  EvolutionProblem(const BoltzmannEntropyModel& model,
                   const AssembledOperator& op, ReactionNetwork network,
                   MobilityModel mobility, Field psi_ext);

  /// Nodal reaction rates; the internal-energy component is zero.
  SpeciesField reactive_rate(const SpeciesField& c, const Field& u) const;

  /// Semidiscrete diffusive rates at a state with its solved potential.
  std::pair<SpeciesField, Field> diffusive_rate(const SpeciesField& c,
                                                const Field& u,
                                                const Field& Psi) const;

  /// Entropy production of the full semidiscrete vector field at a state.
  double entropy_production(const PrimalState& z) const;

  Field total_potential(const PrimalState& z) const;

  /// One accepted step; halves dt on positivity or entropy violations.
  StepResult step(const PrimalState& z, double dt,
                  TimeScheme scheme = TimeScheme::SemiImplicit,
                  double entropy_slack = 1e-10, double dt_min = 1e-12) const;

  Trajectory evolve(const PrimalState& initial, const EvolveOptions& opts,
                    const EquilibriumResult* reference = nullptr) const;

  const BoltzmannEntropyModel& model() const { return model_; }
  const AssembledOperator& op() const { return op_; }

 private:
  PrimalState advance(const PrimalState& z, double dt, TimeScheme scheme) const;

  const BoltzmannEntropyModel& model_;
  const AssembledOperator& op_;
  ReactionNetwork network_;
  MobilityModel mobility_;
  Field psi_ext_;
  SymTridiagonal species_stiffness_;  // unit-coefficient, no boundary terms
};

/// Relative L1 distance between states plus the temperature spread of the
/// first; the metric used for convergence monitoring.
double state_distance(const BoltzmannEntropyModel& model, const PrimalState& z,
                      const EquilibriumResult& ref);

}  // namespace eerds
