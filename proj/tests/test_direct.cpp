#include <cmath>

#include "doctest.h"
#include "eerds/direct_solver.hpp"

using namespace eerds;

namespace {

struct Setup {
  MeshHandle mesh;
  AssembledOperator op;
  Field psi_ext;
  BoltzmannEntropyModel model;
};

Setup canonical(int nodes, bool with_doping = true) {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, nodes, BoundarySpec::robin(1.0),
                                       BoundarySpec::robin(1.0));
  Field doping(mesh, 0.0);
  if (with_doping) {
    for (int j = 0; j < doping.size(); ++j) doping[j] = mesh->node(j) - 0.5;
  }
  PoissonProblem problem{mesh, Field(mesh, 1.0), doping, 0.0, 0.0};
  AssembledOperator op = assemble(problem);
  Field psi_ext = solve_external_potential(op, doping, 0.0, 0.0);
  return {mesh, std::move(op), std::move(psi_ext),
          BoltzmannEntropyModel(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0})};
}

}  // namespace

TEST_CASE("feasible point: zero-charge and charged constructions") {
  Setup s = canonical(41, /*with_doping=*/false);
  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const FeasibilityCertificate cert = direct.feasible_point();
  CHECK(cert.energy_residual <= 1e-10 * 6.0);
  CHECK(cert.charge_residual <= 1e-10);
  // Without data the profile is the positivity floor and a flat energy fill.
  for (int j = 0; j < cert.state.u.size(); ++j) {
    CHECK(cert.state.u[j] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(cert.state.c.species(0)[j] <= 1e-6);
    CHECK(cert.state.c.species(0)[j] > 0.0);
  }

  Setup sq = canonical(41);
  DirectProblem charged(make_entropy_ops(sq.model), sq.op, sq.psi_ext,
                        /*E0=*/min_electro_energy(sq.op, 2.0, sq.psi_ext).value + 1.0,
                        /*Q0=*/2.0);
  const FeasibilityCertificate cq = charged.feasible_point();
  CHECK(cq.energy_residual <= 1e-10 * 3.0);
  CHECK(cq.charge_residual <= 1e-10 * 3.0);
  for (int j = 0; j < cq.state.u.size(); ++j) CHECK(cq.state.u[j] >= 0.0);

  CHECK_THROWS_AS(
      DirectProblem(make_entropy_ops(sq.model), sq.op, sq.psi_ext, 0.5, 2.0),
      InfeasibleScenario);
}

TEST_CASE("constrained ascent meets the functional-minimization route") {
  Setup s = canonical(81);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const DirectSolveReport rep = direct.maximize(direct.feasible_point().state);
  CHECK(rep.converged);
  CHECK(rep.energy_residual <= 1e-10 * 6.0);
  CHECK(rep.charge_residual <= 1e-10);
  CHECK(rep.eta == doctest::Approx(eq.eta).epsilon(1e-6));

  const CrossValidationReport cv = direct.cross_validate(eq, rep.state);
  CHECK(cv.pass);
  CHECK(cv.l1_gap_rel <= 1e-3);
  CHECK(cv.entropy_gap_rel <= 1e-6);
}

TEST_CASE("ascent from the other route's solution is already stationary") {
  Setup s = canonical(61);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  PrimalState start;
  start.c = eq.c;
  start.u = eq.u;
  const double s0 = direct.entropy_total(start);
  const DirectSolveReport rep = direct.maximize(start);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 3);
  CHECK(rep.entropy >= s0 - 1e-10);
}

TEST_CASE("objective is nondecreasing across outer iterations") {
  Setup s = canonical(41);
  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  PrimalState z = direct.feasible_point().state;
  double prev = direct.entropy_total(z);
  DirectSolveOptions opts;
  for (int rounds = 0; rounds < 8; ++rounds) {
    opts.max_iterations = 5;
    const DirectSolveReport rep = direct.maximize(z, opts);
    CHECK(rep.entropy >= prev - 1e-12 * (1.0 + std::abs(prev)));
    CHECK(rep.energy_residual <= 1e-10 * 6.0);
    CHECK(rep.charge_residual <= 1e-10);
    prev = rep.entropy;
    z = rep.state;
    if (rep.converged) break;
  }
}

TEST_CASE("repaired midpoint beats both endpoints' minimum strictly") {
  Setup s = canonical(41);
  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const PrimalState a = direct.feasible_point().state;

  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);
  PrimalState b;
  b.c = eq.c;
  b.u = eq.u;

  const PrimalState mid = direct.repaired_midpoint(a, b);
  CHECK(std::abs(direct.energy_total(mid) - 5.0) <= 1e-10 * 6.0);
  const double s_min = std::min(direct.entropy_total(a), direct.entropy_total(b));
  CHECK(direct.entropy_total(mid) > s_min + 1e-6);
}

TEST_CASE("envelope-smoothed route: multipliers and continuation") {
  Setup s = canonical(61);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const DirectSolveReport base = direct.maximize(direct.feasible_point().state);

  PrimalState start = base.state;
  double prev_gap = 1e300;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const DirectSolveReport rep = direct.maximize_regularized(delta, start);
    CHECK(rep.converged);
    CHECK(rep.eta > 0.0);
    CHECK(rep.multiplier_residual <= 1e-6);

    double gap = 0.0, ref = 0.0;
    for (int i = 0; i < 2; ++i) {
      Field d = rep.state.c.species(i);
      d -= base.state.c.species(i);
      gap += l1_norm(d);
      ref += l1_norm(base.state.c.species(i));
    }
    Field du = rep.state.u;
    du -= base.state.u;
    gap += l1_norm(du);
    ref += l1_norm(base.state.u);
    const double rel = gap / (1.0 + ref);
    CHECK(rel < prev_gap);
    prev_gap = rel;
    start = rep.state;
  }
  CHECK(prev_gap <= 1e-3);

  // Multipliers of the smoothed problems approach the sharp ones.
  const DirectSolveReport last = direct.maximize_regularized(1e-3, start);
  CHECK(last.eta == doctest::Approx(eq.eta).epsilon(1e-2));

  CHECK_THROWS_AS(direct.maximize_regularized(2.0, start), std::invalid_argument);
}

TEST_CASE("cross validation: identical states, detector sensitivity") {
  Setup s = canonical(41);
  DualProblem dual(s.model, s.op, s.psi_ext, 5.0, 0.0);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);
  PrimalState same;
  same.c = eq.c;
  same.u = eq.u;

  DirectProblem direct(make_entropy_ops(s.model), s.op, s.psi_ext, 5.0, 0.0);
  const CrossValidationReport cv = direct.cross_validate(eq, same);
  CHECK(cv.l1_gap_rel == doctest::Approx(0.0));
  CHECK(cv.linf_gap == doctest::Approx(0.0));
  CHECK(cv.pass);

  // A wrong energy budget on the primal side must be flagged by the gap.
  DirectProblem wrong(make_entropy_ops(s.model), s.op, s.psi_ext, 6.0, 0.0);
  const DirectSolveReport rep = wrong.maximize(wrong.feasible_point().state);
  const CrossValidationReport bad = wrong.cross_validate(eq, rep.state);
  CHECK_FALSE(bad.pass);
  CHECK(bad.l1_gap_rel > 1e-2);
  CHECK(bad.entropy_gap_rel > 1e-3);
}

TEST_CASE("grounded wall: both routes and the flow agree end to end") {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 61, BoundarySpec::dirichlet(),
                                       BoundarySpec::robin(1.0));
  Field doping(mesh);
  for (int j = 0; j < doping.size(); ++j) doping[j] = mesh->node(j) - 0.3;
  PoissonProblem problem{mesh, Field(mesh, 1.0), doping, 0.0, 0.2};
  AssembledOperator op = assemble(problem);
  Field psi_ext = solve_external_potential(op, doping, 0.0, 0.2);
  BoltzmannEntropyModel model(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});

  DualProblem dual(model, op, psi_ext, 4.0, 0.5);
  const EquilibriumResult eq = dual.recover(dual.minimize(dual.initial_point()).point);

  DirectProblem direct(make_entropy_ops(model), op, psi_ext, 4.0, 0.5);
  const FeasibilityCertificate cert = direct.feasible_point();
  CHECK(cert.energy_residual <= 1e-9);
  CHECK(cert.charge_residual <= 1e-9);
  const DirectSolveReport rep = direct.maximize(cert.state);
  CHECK(rep.converged);
  const CrossValidationReport cv = direct.cross_validate(eq, rep.state);
  CHECK(cv.pass);
}

TEST_CASE("exclusion family runs through the primal route") {
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 41, BoundarySpec::robin(1.0),
                                       BoundarySpec::robin(1.0));
  PoissonProblem problem{mesh, Field(mesh, 1.0), Field(mesh, 0.0), 0.0, 0.0};
  AssembledOperator op = assemble(problem);
  const Field psi_ext(mesh, 0.0);
  SizeExclusionEntropyModel model(2, 3.0, 0.5, {-1.0, 1.0});

  DirectProblem direct(make_entropy_ops(model), op, psi_ext, 4.0, 0.0);
  const FeasibilityCertificate cert = direct.feasible_point();
  CHECK(cert.energy_residual <= 1e-9);

  DirectSolveOptions opts;
  opts.grad_tol = 1e-6;  // exploratory family, no sharp gate
  opts.max_iterations = 20000;
  const DirectSolveReport rep = direct.maximize(cert.state, opts);
  CHECK(rep.entropy > direct.entropy_total(cert.state));
  CHECK(rep.energy_residual <= 1e-9);
  CHECK(rep.charge_residual <= 1e-9);
  // The optimizer stays inside the exclusion cone.
  for (int j = 0; j < rep.state.u.size(); ++j) {
    const double wu = model.w(rep.state.u[j]);
    CHECK(rep.state.c.species(0)[j] + rep.state.c.species(1)[j] <= wu);
  }
}
