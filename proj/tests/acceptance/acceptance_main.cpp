// End-to-end acceptance battery. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "eerds/direct_solver.hpp"
#include "eerds/dual_solver.hpp"
#include "eerds/electrostatics.hpp"
#include "eerds/entropy.hpp"
#include "eerds/evolution.hpp"

using namespace eerds;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s]: %s  (%s)\n", id, title,
              pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

struct Canonical {
  MeshHandle mesh;
  AssembledOperator op;
  Field psi_ext;
  BoltzmannEntropyModel model;
  static constexpr double E0 = 5.0;
  static constexpr double Q0 = 0.0;
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

double state_l1_gap_rel(const EquilibriumResult& a, const PrimalState& b) {
  double gap = 0.0, ref = 0.0;
  for (int i = 0; i < a.c.species_count(); ++i) {
    Field d = a.c.species(i);
    d -= b.c.species(i);
    gap += l1_norm(d);
    ref += l1_norm(a.c.species(i));
  }
  Field du = a.u;
  du -= b.u;
  gap += l1_norm(du);
  ref += l1_norm(a.u);
  return gap / (1.0 + ref);
}

// --- criterion 1: conjugate duality ---------------------------------------

void criterion_1() {
  const BoltzmannEntropyModel bip(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> unif(0.02, 12.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    PrimalPoint z{{unif(rng), unif(rng)}, unif(rng)};
    const DualVariables d = bip.entropy_gradient(z);
    const PrimalPoint back = bip.dual_entropy_gradient(d.y, d.v);
    double norm = std::abs(z.u), err = std::abs(back.u - z.u);
    for (int i = 0; i < 2; ++i) {
      norm += std::abs(z.c[i]);
      err = std::max(err, std::abs(back.c[i] - z.c[i]));
    }
    worst = std::max(worst, err / (1.0 + norm));
  }
  const bool roundtrip_ok = worst <= 1e-9;

  const BoltzmannEntropyModel unit(1, 1.0, {1.0}, 1.0, 0.5, {1.0});
  const double anchor = unit.dual_entropy({0.0}, -1.0);
  const bool anchor_ok = std::abs(anchor - 5.0) <= 1e-12;

  auto neg_h = [&](const std::vector<double>& z) {
    return bip.neg_entropy_extended(z);
  };
  OracleBox box;
  box.lo = {1e-3, 1e-3, 1e-3};
  box.hi = {50.0, 50.0, 50.0};
  std::uniform_real_distribution<double> uy(-0.7, 0.7), uv(-2.5, -0.6);
  double worst_rel = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> y{uy(rng), uy(rng)};
    const double v = uv(rng);
    const double closed = bip.dual_entropy(y, v);
    const double brute =
        legendre_oracle(neg_h, {y[0], y[1], v}, box, 4, 33);
    worst_rel = std::max(worst_rel,
                         std::abs(closed - brute) / (1.0 + std::abs(closed)));
  }
  const bool oracle_ok = worst_rel <= 1e-5;

  report(1, "conjugate duality", roundtrip_ok && anchor_ok && oracle_ok,
         fmt("max roundtrip %.2e, max oracle gap %.2e, anchor %.15g", worst,
             worst_rel, anchor));
}

// --- criterion 2: minimal electrostatic energy -----------------------------

void criterion_2() {
  // Pure Robin closed form and its attainment.
  MeshHandle mr = build_uniform_mesh(0.0, 1.0, 401, BoundarySpec::robin(1.0),
                                     BoundarySpec::robin(1.0));
  PoissonProblem pr{mr, Field(mr, 1.0), Field(mr, 0.0), 0.0, 0.0};
  const AssembledOperator opr = assemble(pr);
  const MinimalEnergy v = min_electro_energy(opr, 2.0, Field(mr, 0.0));
  const bool closed_ok = v.kappa_star && std::abs(v.value - 1.0) <= 1e-12 &&
                         std::abs(*v.kappa_star - 1.0) <= 1e-12;

  Field level(mr, *v.kappa_star);
  const std::vector<double> load = opr.apply(level);
  Field rho_star(mr);
  for (int j = 0; j < rho_star.size(); ++j) rho_star[j] = load[j] / mr->weight(j);
  const double attained = electrostatic_energy(opr, rho_star, Field(mr, 0.0));
  const double h = 1.0 / 400.0;
  const bool attained_ok = std::abs(attained - v.value) <= 2.0 * h * h;

  // Dirichlet wall: zero bound and root-n decay of concentrated charges.
  MeshHandle md = build_uniform_mesh(0.0, 1.0, 513, BoundarySpec::dirichlet(),
                                     BoundarySpec::neumann());
  PoissonProblem pd{md, Field(md, 1.0), Field(md, 0.0), 0.0, 0.0};
  const AssembledOperator opd = assemble(pd);
  const bool dirichlet_ok =
      min_electro_energy(opd, 3.0, Field(md, 0.0)).value == 0.0;

  double norms[3];
  int idx = 0;
  for (int n : {4, 16, 64}) {
    norms[idx++] =
        opd.dual_norm_of_load(opd.density_load(dirichlet_charge_concentration(md, n)));
  }
  double slope_lo = 0.0, slope_hi = -1.0;
  for (int i = 0; i + 1 < 3; ++i) {
    const double slope = std::log(norms[i + 1] / norms[i]) / std::log(4.0);
    slope_lo = std::min(slope_lo == 0.0 ? slope : slope_lo, slope);
    slope_hi = std::max(slope_hi, slope);
  }
  const bool slope_ok =
      slope_lo >= -0.6 && slope_hi <= -0.4;

  report(2, "minimal electrostatic energy",
         closed_ok && attained_ok && dirichlet_ok && slope_ok,
         fmt("V %.15g, attained gap %.2e, decay slopes [%.3f]", v.value,
             std::abs(attained - v.value), slope_lo));
}

// --- criteria 3-5, 7: the canonical pipeline -------------------------------

void criteria_3_to_7() {
  Canonical c = make_canonical(401);
  DualProblem dual(c.model, c.op, c.psi_ext, Canonical::E0, Canonical::Q0);
  DualSolveOptions dopts;
  dopts.grad_tol = 1e-9;

  const DualSolveReport drep = dual.minimize(dual.initial_point(), dopts);
  const EquilibriumResult eq = dual.recover(drep.point);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  auto random_start = [&]() {
    DualPoint p = dual.initial_point();
    p.eta *= std::exp(unif(rng));
    p.kappa = unif(rng);
    for (int j = 0; j < p.lambda.size(); ++j) p.lambda[j] = 0.2 * unif(rng);
    return p;
  };
  const DualSolveReport probe_a = dual.minimize(random_start(), dopts);
  const DualSolveReport probe_b = dual.minimize(random_start(), dopts);
  Field dl = probe_a.point.lambda;
  dl -= probe_b.point.lambda;
  const double uniq_gap = std::abs(probe_a.point.eta - probe_b.point.eta) +
                          std::abs(probe_a.point.kappa - probe_b.point.kappa) +
                          l1_norm(dl);

  const bool c3 = drep.converged && drep.gradient_norm <= 1e-8 &&
                  eq.diagnostics.energy_residual <= 1e-7 &&
                  eq.diagnostics.charge_residual <= 1e-7 &&
                  eq.diagnostics.theta_spread_rel <= 1e-8 &&
                  eq.diagnostics.zeta_defect <= 1e-7 && uniq_gap <= 1e-6;
  report(3, "dual pipeline", c3,
         fmt("grad %.2e, dE %.2e, theta spread %.2e", drep.gradient_norm,
             eq.diagnostics.energy_residual, eq.diagnostics.theta_spread_rel) +
             fmt(", zeta %.2e, restart gap %.2e", eq.diagnostics.zeta_defect,
                 uniq_gap));

  // Criterion 4: the primal route lands on the same state.
  DirectProblem direct(make_entropy_ops(c.model), c.op, c.psi_ext, Canonical::E0,
                       Canonical::Q0);
  const DirectSolveReport prep = direct.maximize(direct.feasible_point().state);
  const CrossValidationReport cv = direct.cross_validate(eq, prep.state);
  const bool c4 = prep.converged && cv.l1_gap_rel <= 1e-3 &&
                  cv.entropy_gap_rel <= 1e-6;
  report(4, "route equivalence", c4,
         fmt("L1 gap %.2e, entropy gap %.2e", cv.l1_gap_rel, cv.entropy_gap_rel));

  // Criterion 5: envelope continuation on both routes.
  bool c5 = true;
  std::string c5_detail;
  {
    double prev_gap = 1e300;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      DualProblem tilted(c.model, c.op, c.psi_ext, Canonical::E0, Canonical::Q0,
                         delta);
      const DualSolveReport rep = tilted.minimize(drep.point, dopts);
      Field diff = rep.point.lambda;
      diff -= drep.point.lambda;
      const double gap =
          (std::abs(rep.point.eta - drep.point.eta) +
           std::abs(rep.point.kappa - drep.point.kappa) + l1_norm(diff)) /
          (1.0 + std::abs(drep.point.eta));
      c5 = c5 && rep.converged && gap < prev_gap;
      prev_gap = gap;
    }
    c5 = c5 && prev_gap <= 1e-3;
    c5_detail = fmt("dual gap(1e-3) %.2e", prev_gap);

    PrimalState start = prep.state;
    prev_gap = 1e300;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      const DirectSolveReport rep = direct.maximize_regularized(delta, start);
      const double gap = state_l1_gap_rel(eq, rep.state);
      c5 = c5 && rep.converged && rep.eta > 0.0 && gap < prev_gap;
      prev_gap = gap;
      start = rep.state;
    }
    c5 = c5 && prev_gap <= 1e-3;
    c5_detail += fmt(", primal gap(1e-3) %.2e", prev_gap);
  }
  report(5, "regularization continuation", c5, c5_detail);

  // Criterion 7: relaxation of the evolution onto the computed equilibrium.
  {
    Reaction r;
    r.alpha = {1, 1};
    r.beta = {0, 0};
    r.rate = 1.0;
    ReactionNetwork network({r}, c.model.charges(), true);
    MobilityModel mobility{{1.0, 1.0}, 1.0};
    EvolutionProblem evo(c.model, c.op, std::move(network), mobility, c.psi_ext);

    const PrimalState initial = direct.feasible_point().state;
    EvolveOptions opts;
    opts.t_end = 120.0;
    opts.dt_initial = 1e-3;
    opts.dt_max = 0.05;
    opts.distance_tol = 0.0;  // run on the clock, measure the final gap
    opts.max_steps = 100000;
    Trajectory traj = evo.evolve(initial, opts, &eq);
    const double final_gap = state_l1_gap_rel(eq, traj.snapshots.back().second);

    PrimalState at_eq;
    at_eq.c = eq.c;
    at_eq.u = eq.u;
    const Field psi = evo.total_potential(at_eq);
    const auto [c_rate, u_rate] = evo.diffusive_rate(at_eq.c, at_eq.u, psi);
    const SpeciesField r_rate = evo.reactive_rate(at_eq.c, at_eq.u);
    double rate_norm = linf_norm(u_rate);
    for (int i = 0; i < 2; ++i) {
      rate_norm = std::max(rate_norm, linf_norm(c_rate.species(i)));
      rate_norm = std::max(rate_norm, linf_norm(r_rate.species(i)));
    }
    const double h = 1.0 / 400.0;
    const bool stationary_ok = rate_norm <= 10.0 * (h * h + 1e-8);

    const bool c7 =
        traj.min_entropy_increment >= -1e-10 * (1.0 + std::abs(traj.entropy[0])) &&
        traj.max_charge_drift <= 1e-10 &&
        traj.max_energy_drift_rel <= 1e-8 && final_gap <= 1e-4 && stationary_ok;
    report(7, "gradient-flow relaxation", c7,
           fmt("final gap %.2e, dS_min %.1e, dQ %.1e", final_gap,
               traj.min_entropy_increment, traj.max_charge_drift) +
               fmt(", dE %.1e, stationary rate %.1e", traj.max_energy_drift_rel,
                   rate_norm));
  }
}

// --- criterion 6: sharp Young-type bound ------------------------------------

void criterion_6() {
  bool ok = true;
  double worst = 1e300;
  for (double p : {0.5, 1.0, 2.0}) {
    for (double delta : {0.25, 1.0, 4.0}) {
      for (double q : {2.0, 4.0, 6.0}) {
        const double margin =
            young_bound_min_margin(p, q, delta, 100.0, 100.0, 100);
        worst = std::min(worst, margin);
        ok = ok && margin >= -1e-12;
      }
    }
  }
  // Sharpness of the p = 1, delta = 1 case at eta = |mu|.
  const double c_delta = young_lower_bound_constant(1.0, 1.0);
  double eq_gap = 0.0;
  for (double mu : {0.25, 1.0, 7.0}) {
    eq_gap = std::max(eq_gap,
                      std::abs(mu * mu / mu - (c_delta * mu - mu)));
  }
  ok = ok && eq_gap <= 1e-12 && std::abs(c_delta - 2.0) <= 1e-15;
  report(6, "young-type bound", ok,
         fmt("min margin %.2e, equality gap %.2e", worst, eq_gap));
}

// --- criterion 8: discretization convergence --------------------------------

void criterion_8() {
  double prev = 0.0;
  bool order_ok = true;
  std::string detail;
  for (int level = 0; level < 3; ++level) {
    const int n = level == 0 ? 51 : level == 1 ? 101 : 201;
    MeshHandle m = build_uniform_mesh(0.0, 1.0, n, BoundarySpec::dirichlet(),
                                      BoundarySpec::dirichlet());
    PoissonProblem p{m, Field(m, 1.0), Field(m, 0.0), 0.0, 0.0};
    const AssembledOperator op = assemble(p);
    Field rho(m);
    for (int j = 0; j < n; ++j) {
      rho[j] = M_PI * M_PI * std::sin(M_PI * m->node(j));
    }
    const Field psi = solve_internal_potential(op, rho);
    Field err = psi;
    for (int j = 0; j < n; ++j) err[j] -= std::sin(M_PI * m->node(j));
    const double e = l2_norm(err);
    if (level > 0) {
      const double rate = std::log2(prev / e);
      order_ok = order_ok && std::abs(rate - 2.0) <= 0.2;
      detail += fmt("rate %.3f ", rate);
    }
    prev = e;
  }

  double theta[2];
  int idx = 0;
  for (int n : {201, 401}) {
    Canonical c = make_canonical(n);
    DualProblem dual(c.model, c.op, c.psi_ext, Canonical::E0, Canonical::Q0);
    theta[idx++] = dual.recover(dual.minimize(dual.initial_point()).point).theta;
  }
  const double drift = std::abs(theta[0] - theta[1]) / std::abs(theta[1]);
  const bool theta_ok = drift <= 1e-4;

  report(8, "discretization convergence", order_ok && theta_ok,
         detail + fmt(", theta drift %.2e", drift));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criteria_3_to_7();
  criterion_6();
  criterion_8();
  std::printf("%s\n", failures == 0 ? "acceptance: all criteria PASS"
                                    : "acceptance: FAILURES present");
  return failures;
}
