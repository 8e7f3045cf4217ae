#include <benchmark/benchmark.h>

#include "eerds/direct_solver.hpp"
#include "eerds/dual_solver.hpp"
#include "eerds/electrostatics.hpp"
#include "eerds/evolution.hpp"

using namespace eerds;

namespace {

struct Canonical {
  MeshHandle mesh;
  AssembledOperator op;
  Field psi_ext;
  BoltzmannEntropyModel model;
};

Canonical make_canonical(int nodes) {
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

}  // namespace

static void BM_PoissonSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshHandle mesh = build_uniform_mesh(0.0, 1.0, n, BoundarySpec::dirichlet(),
                                       BoundarySpec::robin(1.0));
  PoissonProblem problem{mesh, Field(mesh, 1.0), Field(mesh, 0.0), 0.0, 0.0};
  const AssembledOperator op = assemble(problem);
  Field rho(mesh);
  for (int j = 0; j < n; ++j) rho[j] = mesh->node(j) - 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_internal_potential(op, rho));
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(401)->Arg(2001);

static void BM_ReducedDualEval(benchmark::State& state) {
  const BoltzmannEntropyModel model(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});
  double mu = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.reduced_dual(mu, 1.3));
    mu = -mu;
  }
}
BENCHMARK(BM_ReducedDualEval);

static void BM_DualSolve(benchmark::State& state) {
  Canonical c = make_canonical(static_cast<int>(state.range(0)));
  DualProblem dual(c.model, c.op, c.psi_ext, 5.0, 0.0);
  const DualPoint init = dual.initial_point();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual.minimize(init));
  }
}
BENCHMARK(BM_DualSolve)->Arg(201)->Arg(401);

static void BM_DirectSolve(benchmark::State& state) {
  Canonical c = make_canonical(static_cast<int>(state.range(0)));
  DirectProblem direct(make_entropy_ops(c.model), c.op, c.psi_ext, 5.0, 0.0);
  const PrimalState start = direct.feasible_point().state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(direct.maximize(start));
  }
}
BENCHMARK(BM_DirectSolve)->Arg(201);

static void BM_EvolutionStep(benchmark::State& state) {
  Canonical c = make_canonical(static_cast<int>(state.range(0)));
  Reaction r;
  r.alpha = {1, 1};
  r.beta = {0, 0};
  EvolutionProblem evo(c.model, c.op, ReactionNetwork({r}, c.model.charges()),
                       MobilityModel{{1.0, 1.0}, 1.0}, c.psi_ext);
  PrimalState z;
  z.c = SpeciesField(c.mesh, 2, c.model.charges());
  z.c.species(0).fill(1.0);
  z.c.species(1).fill(1.0);
  z.u = Field(c.mesh, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evo.step(z, 1e-3));
  }
}
BENCHMARK(BM_EvolutionStep)->Arg(401);

BENCHMARK_MAIN();
