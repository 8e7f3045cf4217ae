#include <cmath>
#include <random>

#include "doctest.h"
#include "eerds/evolution.hpp"

using namespace eerds;

namespace {

struct Setup {
  MeshHandle mesh;
  AssembledOperator op;
  Field psi_ext;
  BoltzmannEntropyModel model;
};

Setup canonical(int nodes) {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, nodes, BoundarySpec::robin(1.0),
                                       BoundarySpec::robin(1.0));
  Field doping(mesh);
  for (int j = 0; j < doping.size(); ++j) doping[j] = mesh->node(j) - 0.5;
  PoissonProblem problem{mesh, Field(mesh, 1.0), doping, 0.0, 0.0};
  AssembledOperator op = assemble(problem);
  Field psi_ext = solve_external_potential(op, doping, 0.0, 0.0);
  return {mesh, std::move(op), std::move(psi_ext),
          BoltzmannEntropyModel(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0})};
}

ReactionNetwork recombination(const std::vector<double>& charges) {
  Reaction r;
  r.alpha = {1, 1};
  r.beta = {0, 0};
  r.rate = 1.0;
  return ReactionNetwork({r}, charges, /*require_single_conservation_law=*/true);
}

MobilityModel unit_mobility(int species) {
  MobilityModel m;
  m.species_mobility.assign(species, 1.0);
  m.heat_conductivity = 1.0;
  return m;
}

EvolutionProblem make_evolution(const Setup& s, ReactionNetwork network) {
  return EvolutionProblem(s.model, s.op, std::move(network),
                          unit_mobility(s.model.species_count()), s.psi_ext);
}

PrimalState constant_state(const Setup& s, double c1, double c2, double u) {
  PrimalState z;
  z.c = SpeciesField(s.mesh, 2, s.model.charges());
  z.c.species(0).fill(c1);
  z.c.species(1).fill(c2);
  z.u = Field(s.mesh, u);
  return z;
}

}  // namespace

TEST_CASE("reaction network validation") {
  // Exchanging differently charged species does not conserve charge.
  Reaction exchange;
  exchange.alpha = {1, 0};
  exchange.beta = {0, 1};
  CHECK_THROWS_AS(ReactionNetwork({exchange}, {-1.0, 1.0}),
                  std::invalid_argument);
  // With equal charges it does, and charge is the only conservation law.
  CHECK_NOTHROW(ReactionNetwork({exchange}, {1.0, 1.0}, true));
  // Pair annihilation conserves the bipolar charge and spans its kernel.
  CHECK_NOTHROW(recombination({-1.0, 1.0}));

  Reaction bad;
  bad.alpha = {1, -1};
  bad.beta = {0, 0};
  CHECK_THROWS_AS(ReactionNetwork({bad}, {1.0, -1.0}), std::invalid_argument);
  Reaction zero_rate = exchange;
  zero_rate.rate = 0.0;
  CHECK_THROWS_AS(ReactionNetwork({zero_rate}, {1.0, 1.0}),
                  std::invalid_argument);
  // An empty network cannot certify a single conservation law over 2 species.
  CHECK_THROWS_AS(ReactionNetwork({}, {1.0, 1.0}, true), std::invalid_argument);
}

TEST_CASE("reactive rates: detailed balance and hand values") {
  Setup s = canonical(21);

  // Equilibrium concentrations kill the flux.
  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  const double u = 2.0;
  PrimalState eqz = constant_state(s, s.model.equilibrium_concentration(0, u),
                                   s.model.equilibrium_concentration(1, u), u);
  const SpeciesField rate_eq = evo.reactive_rate(eqz.c, eqz.u);
  CHECK(linf_norm(rate_eq.species(0)) <= 1e-13);
  CHECK(linf_norm(rate_eq.species(1)) <= 1e-13);

  // Exchange reaction among equally charged species at c1 = 4 w1, c2 = w2:
  // both algebraic routes give a flux of 3 along the net stoichiometry.
  BoltzmannEntropyModel uni(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {1.0, 1.0});
  Reaction exchange;
  exchange.alpha = {1, 0};
  exchange.beta = {0, 1};
  exchange.rate = 1.0;
  EvolutionProblem evo_x(uni, s.op, ReactionNetwork({exchange}, {1.0, 1.0}),
                         unit_mobility(2), s.psi_ext);
  PrimalState zx = constant_state(s, 4.0 * uni.equilibrium_concentration(0, u),
                                  uni.equilibrium_concentration(1, u), u);
  zx.c = SpeciesField(s.mesh, 2, uni.charges());
  zx.c.species(0).fill(4.0 * uni.equilibrium_concentration(0, u));
  zx.c.species(1).fill(uni.equilibrium_concentration(1, u));
  const SpeciesField rate = evo_x.reactive_rate(zx.c, zx.u);
  CHECK(rate.species(0)[3] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(rate.species(1)[3] == doctest::Approx(3.0).epsilon(1e-12));
  // The hyperbolic-sine factor alone at this affinity.
  const double prefactor = std::sqrt(4.0);
  const double sinh_factor = 2.0 * std::sinh(0.5 * std::log(4.0));
  CHECK(prefactor * sinh_factor == doctest::Approx(3.0));
  CHECK(2.0 * std::sinh(-0.5 * std::log(4.0)) == doctest::Approx(-1.5));

  // Nodewise charge neutrality of the reactive rate.
  EvolutionProblem evo_r = make_evolution(s, recombination({-1.0, 1.0}));
  PrimalState z = constant_state(s, 0.7, 2.3, 1.7);
  const SpeciesField r = evo_r.reactive_rate(z.c, z.u);
  for (int j = 0; j < s.mesh->node_count(); ++j) {
    CHECK(std::abs(-r.species(0)[j] + r.species(1)[j]) <= 1e-14);
  }
}

TEST_CASE("diffusive rates vanish for neutral constant states") {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 31, BoundarySpec::robin(1.0),
                                       BoundarySpec::robin(1.0));
  PoissonProblem problem{mesh, Field(mesh, 1.0), Field(mesh, 0.0), 0.0, 0.0};
  AssembledOperator op = assemble(problem);
  BoltzmannEntropyModel model(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});
  EvolutionProblem evo(model, op, ReactionNetwork({}, model.charges()),
                       unit_mobility(2), Field(mesh, 0.0));

  PrimalState z;
  z.c = SpeciesField(mesh, 2, model.charges());
  z.c.species(0).fill(1.3);
  z.c.species(1).fill(1.3);
  z.u = Field(mesh, 2.0);
  const Field psi = evo.total_potential(z);
  CHECK(linf_norm(psi) <= 1e-12);
  const auto [c_rate, u_rate] = evo.diffusive_rate(z.c, z.u, psi);
  CHECK(linf_norm(c_rate.species(0)) <= 1e-12);
  CHECK(linf_norm(c_rate.species(1)) <= 1e-12);
  CHECK(linf_norm(u_rate) <= 1e-12);
}

TEST_CASE("the recovered equilibrium is a stationary state") {
  Setup s = canonical(81);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  DualSolveOptions dopts;
  dopts.grad_tol = 1e-11;
  const EquilibriumResult eq =
      dual.recover(dual.minimize(dual.initial_point(), dopts).point);

  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  PrimalState z;
  z.c = eq.c;
  z.u = eq.u;
  const Field psi = evo.total_potential(z);
  const auto [c_rate, u_rate] = evo.diffusive_rate(z.c, z.u, psi);
  const SpeciesField r_rate = evo.reactive_rate(z.c, z.u);
  const double h = 1.0 / 80.0;
  const double tol = 10.0 * (h * h + 1e-8);
  CHECK(linf_norm(c_rate.species(0)) <= tol);
  CHECK(linf_norm(c_rate.species(1)) <= tol);
  CHECK(linf_norm(u_rate) <= tol);
  CHECK(linf_norm(r_rate.species(0)) <= tol);

  // A step leaves the state unchanged within tolerance for any sane dt.
  for (double dt : {1e-3, 1e-2, 5e-2}) {
    const StepResult r = evo.step(z, dt);
    Field du = r.state.u;
    du -= z.u;
    CHECK(linf_norm(du) <= 1e-6);
  }
}

TEST_CASE("entropy production is nonnegative at random positive states") {
  Setup s = canonical(31);
  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(0.3, 4.0);
  for (int k = 0; k < 20; ++k) {
    PrimalState z;
    z.c = SpeciesField(s.mesh, 2, s.model.charges());
    z.u = Field(s.mesh);
    for (int j = 0; j < s.mesh->node_count(); ++j) {
      const double x = s.mesh->node(j);
      z.c.species(0)[j] = unif(rng) * (1.0 + 0.3 * std::sin(3.0 * x));
      z.c.species(1)[j] = unif(rng) * (1.0 + 0.3 * std::cos(2.0 * x));
      z.u[j] = unif(rng) * (1.0 + 0.2 * std::sin(5.0 * x));
    }
    CHECK(evo.entropy_production(z) >= -1e-12);
  }
}

TEST_CASE("one step conserves energy and charge and produces entropy") {
  Setup s = canonical(61);
  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  PrimalState z;
  z.c = SpeciesField(s.mesh, 2, s.model.charges());
  z.u = Field(s.mesh);
  for (int j = 0; j < s.mesh->node_count(); ++j) {
    const double x = s.mesh->node(j);
    z.c.species(0)[j] = 1.0 + 0.5 * std::sin(4.0 * x);
    z.c.species(1)[j] = 1.2 + 0.4 * std::cos(3.0 * x);
    z.u[j] = 3.0 + 0.5 * x;
  }
  const StepResult before = evo.step(z, 0.0);
  const StepResult after = evo.step(z, 1e-2);
  CHECK(after.dt_used == doctest::Approx(1e-2));
  CHECK(after.entropy >= before.entropy);
  CHECK(std::abs(after.energy - before.energy) <=
        1e-8 * (1.0 + std::abs(before.energy)));
  CHECK(std::abs(after.charge - before.charge) <= 1e-10);

  // dt = 0 leaves the state untouched.
  Field du = before.state.u;
  du -= z.u;
  CHECK(linf_norm(du) == 0.0);
}

TEST_CASE("dt control halves on forced entropy violations and can underflow") {
  Setup s = canonical(31);
  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  PrimalState z = constant_state(s, 1.0, 1.0, 2.0);
  // An impossible slack demand forces repeated halvings down to the floor.
  CHECK_THROWS_AS(evo.step(z, 1e-2, TimeScheme::SemiImplicit,
                           /*entropy_slack=*/-1.0, /*dt_min=*/1e-6),
                  std::runtime_error);
}

TEST_CASE("trajectory relaxes to the computed equilibrium") {
  Setup s = canonical(81);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  DirectProblem seed(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const PrimalState initial = seed.feasible_point().state;

  EvolveOptions opts;
  opts.t_end = 80.0;
  opts.dt_initial = 1e-3;
  opts.dt_max = 0.05;
  opts.distance_tol = 1e-4;
  const Trajectory traj = evo.evolve(initial, opts, &eq);

  CHECK(traj.reached_distance_tol);
  CHECK(traj.distance.back() <= 1e-4);
  CHECK(traj.min_entropy_increment >= -1e-10 * (1.0 + std::abs(traj.entropy[0])));
  CHECK(traj.max_charge_drift <= 1e-10);
  CHECK(traj.max_energy_drift_rel <= 1e-8);

  // Entropy grows toward the equilibrium value from below.
  CHECK(traj.entropy.back() <= eq.entropy + 1e-8);
  CHECK(traj.entropy.back() >= traj.entropy.front());

  // Starting at the equilibrium keeps every monitor flat.
  PrimalState at_eq;
  at_eq.c = eq.c;
  at_eq.u = eq.u;
  EvolveOptions short_opts;
  short_opts.t_end = 0.5;
  short_opts.dt_initial = 1e-2;
  const Trajectory flat = evo.evolve(at_eq, short_opts, &eq);
  for (double d : flat.distance) CHECK(d <= 1e-5);
  CHECK(std::abs(flat.entropy.back() - flat.entropy.front()) <=
        1e-9 * (1.0 + std::abs(flat.entropy.front())));
}

TEST_CASE("insulated walls: the flow stays compatible and relaxes") {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 41, BoundarySpec::neumann(),
                                       BoundarySpec::neumann());
  Field doping(mesh);
  for (int j = 0; j < doping.size(); ++j) doping[j] = mesh->node(j) - 0.5;
  PoissonProblem problem{mesh, Field(mesh, 1.0), doping, 0.0, 0.0};
  AssembledOperator op = assemble(problem);
  Field psi_ext = solve_external_potential(op, doping, 0.0, 0.0);
  BoltzmannEntropyModel model(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});

  DualProblem dual(model, op, psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  EvolutionProblem evo(model, op, recombination({-1.0, 1.0}),
                       unit_mobility(2), psi_ext);
  DirectProblem seed(make_entropy_ops(model), op, psi_ext, 5.0, 0.0);
  EvolveOptions opts;
  opts.t_end = 60.0;
  opts.distance_tol = 1e-4;
  const Trajectory traj = evo.evolve(seed.feasible_point().state, opts, &eq);
  CHECK(traj.reached_distance_tol);
  CHECK(traj.max_charge_drift <= 1e-10);
  CHECK(traj.max_energy_drift_rel <= 1e-8);
}

TEST_CASE("explicit scheme agrees with the semi-implicit one for small dt") {
  Setup s = canonical(41);
  EvolutionProblem evo = make_evolution(s, recombination({-1.0, 1.0}));
  PrimalState z = constant_state(s, 1.0, 1.4, 3.0);
  const StepResult a = evo.step(z, 1e-5, TimeScheme::SemiImplicit);
  const StepResult b = evo.step(z, 1e-5, TimeScheme::Explicit);
  Field diff = a.state.u;
  diff -= b.state.u;
  CHECK(linf_norm(diff) <= 1e-7);
}
