#include "eerds/runner.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <random>
#include <sstream>

#include "eerds/direct_solver.hpp"
#include "eerds/dual_solver.hpp"
#include "eerds/electrostatics.hpp"
#include "eerds/entropy.hpp"
#include "eerds/evolution.hpp"
#include "eerds/json_writer.hpp"

#include "json.hpp"

namespace eerds {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_field_csv(const fs::path& path, const std::vector<std::string>& names,
                     const std::vector<const Field*>& fields, bool also_dat) {
  std::ostringstream os;
  write_csv(os, names, fields);
  write_text(path, os.str());
  if (also_dat) {
    std::string dat = os.str();
    for (char& ch : dat) {
      if (ch == ',') ch = ' ';
    }
    fs::path p = path;
    p.replace_extension(".dat");
    write_text(p, "# " + dat);  // gnuplot: comment out the header row
  }
}

std::vector<std::string> state_column_names(int species) {
  std::vector<std::string> names;
  for (int i = 0; i < species; ++i) names.push_back("c_" + std::to_string(i + 1));
  names.push_back("u");
  return names;
}

void write_state_csv(const fs::path& path, const SpeciesField& c, const Field& u,
                     const Field* psi, bool also_dat) {
  std::vector<std::string> names = state_column_names(c.species_count());
  std::vector<const Field*> fields;
  for (int i = 0; i < c.species_count(); ++i) fields.push_back(&c.species(i));
  fields.push_back(&u);
  if (psi != nullptr) {
    names.push_back("Psi");
    fields.push_back(psi);
  }
  write_field_csv(path, names, fields, also_dat);
}

double l1_gap(const DualPoint& a, const DualPoint& b) {
  Field d = a.lambda;
  d -= b.lambda;
  return std::abs(a.eta - b.eta) + std::abs(a.kappa - b.kappa) + l1_norm(d);
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario_in, const std::string& output_dir,
                        const RunOverrides& overrides) {
  Scenario scenario = scenario_in;
  if (overrides.tol_grad) scenario.tol_grad = *overrides.tol_grad;
  if (overrides.seed) scenario.seed = *overrides.seed;
  if (overrides.stages) scenario.stages = *overrides.stages;
  scenario.validate();

  fs::create_directories(output_dir);
  const fs::path dir(output_dir);

  RunOutcome outcome;
  JsonWriter json;

  const MeshHandle mesh = scenario.make_mesh();
  PoissonProblem poisson{mesh, scenario.epsilon.sample(mesh),
                         scenario.doping.sample(mesh), scenario.g_left,
                         scenario.g_right};
  const AssembledOperator op = assemble(poisson);
  const Field psi_ext = solve_external_potential(op, poisson.doping,
                                                 scenario.g_left, scenario.g_right);

  json.begin_object();
  json.kv("schema", "eerds-summary/1");
  json.key("scenario");
  json.begin_object();
  json.kv("family", scenario.family == EntropyFamily::Boltzmann
                        ? "boltzmann"
                        : "size_exclusion");
  json.kv("species", scenario.species);
  json.kv("nodes", scenario.nodes);
  json.kv("case", to_string(mesh->classification()));
  json.kv("E0", scenario.E0);
  json.kv("Q0", scenario.Q0);
  json.kv("seed", static_cast<int>(scenario.seed));
  json.end_object();

  json.key("stages_enabled");
  json.begin_object();
  json.kv("electro", scenario.stages.electro);
  json.kv("dual", scenario.stages.dual);
  json.kv("direct", scenario.stages.direct);
  json.kv("evolve", scenario.stages.evolve);
  json.end_object();

  // Electrostatics stage: minimal energy and feasibility gate.
  MinimalEnergy min_energy = min_electro_energy(op, scenario.Q0, psi_ext);
  const bool feasible = scenario.E0 > min_energy.value;
  outcome.minimal_energy = min_energy.value;
  if (scenario.stages.electro) {
    json.key("electrostatics");
    json.begin_object();
    json.kv("V", min_energy.value);
    if (min_energy.kappa_star) {
      json.kv("kappa_star", *min_energy.kappa_star);
    } else {
      json.kv_null("kappa_star");
    }
    json.kv("feasible", feasible);
    json.end_object();
    write_field_csv(dir / "psi_ext.csv", {"psi_ext"}, {&psi_ext},
                    overrides.emit_dat);
  }
  if (!feasible) {
    outcome.infeasible = true;
    outcome.failures.push_back("infeasible: E0 <= V");
  }

  const bool boltzmann = scenario.family == EntropyFamily::Boltzmann;
  std::optional<BoltzmannEntropyModel> model;
  std::optional<SizeExclusionEntropyModel> excl_model;
  if (boltzmann) {
    model.emplace(scenario.make_boltzmann_model());
  } else {
    excl_model.emplace(scenario.make_size_exclusion_model());
  }

  std::optional<EquilibriumResult> dual_result;

  // Dual stage.
  if (scenario.stages.dual && feasible) {
    if (!boltzmann) {
      outcome.failures.push_back(
          "dual: the functional-minimization route needs the superlinear "
          "reduced dual of the boltzmann family");
    } else {
      try {
        DualProblem dual(*model, op, psi_ext, scenario.E0, scenario.Q0);
        DualSolveOptions opts;
        opts.grad_tol = scenario.tol_grad;
        opts.max_iterations = scenario.max_iterations;
        opts.record_trace = true;
        DualSolveReport report = dual.minimize(dual.initial_point(), opts);

        std::ostringstream trace;
        trace << "iteration,k_value,gradient_norm,step_size\n";
        trace.precision(17);
        for (const auto& rec : report.trace) {
          trace << rec.iteration << "," << rec.k_value << ","
                << rec.gradient_norm << "," << rec.step_size << "\n";
        }
        write_text(dir / "trace_dual.csv", trace.str());

        EquilibriumResult eq = dual.recover(report.point);
        write_state_csv(dir / "fields_dual.csv", eq.c, eq.u, &eq.Psi,
                        overrides.emit_dat);

        // Two seeded restarts witness uniqueness of the minimizer.
        std::mt19937 rng(scenario.seed);
        std::uniform_real_distribution<double> unif(-0.5, 0.5);
        auto random_start = [&]() {
          DualPoint p = dual.initial_point();
          p.eta *= std::exp(unif(rng));
          p.kappa = unif(rng);
          for (int j = 0; j < p.lambda.size(); ++j) p.lambda[j] = 0.2 * unif(rng);
          return p;
        };
        DualSolveOptions probe_opts = opts;
        probe_opts.record_trace = false;
        const DualSolveReport probe_a = dual.minimize(random_start(), probe_opts);
        const DualSolveReport probe_b = dual.minimize(random_start(), probe_opts);
        const double uniq_gap = l1_gap(probe_a.point, probe_b.point);

        const double scale_e = 1.0 + std::abs(scenario.E0);
        const double scale_q = 1.0 + std::abs(scenario.Q0);
        bool pass = report.converged && probe_a.converged && probe_b.converged;
        if (eq.diagnostics.energy_residual > 1e-7 * scale_e) pass = false;
        if (eq.diagnostics.charge_residual > 1e-7 * scale_q) pass = false;
        if (eq.diagnostics.theta_spread_rel > 1e-8) pass = false;
        if (uniq_gap > 1e-6 * (1.0 + std::abs(eq.eta) + std::abs(eq.kappa))) {
          pass = false;
        }
        if (!pass) outcome.failures.push_back("dual stage checks failed");

        json.key("dual");
        json.begin_object();
        json.kv("converged", report.converged);
        json.kv("iterations", report.iterations);
        json.kv("eta", eq.eta);
        json.kv("kappa", eq.kappa);
        json.kv("theta", eq.theta);
        json.kv("k_value", report.k_value);
        json.kv("gradient_norm", report.gradient_norm);
        json.kv("entropy", eq.entropy);
        json.kv("energy_residual", eq.diagnostics.energy_residual);
        json.kv("charge_residual", eq.diagnostics.charge_residual);
        json.kv("theta_spread_rel", eq.diagnostics.theta_spread_rel);
        json.kv("zeta_defect", eq.diagnostics.zeta_defect);
        json.kv("poisson_residual_rel", eq.diagnostics.poisson_residual_rel);
        json.kv("uniqueness_gap", uniq_gap);
        json.kv("pass", pass);
        json.end_object();

        dual_result = std::move(eq);
      } catch (const std::exception& e) {
        outcome.failures.push_back(std::string("dual: ") + e.what());
      }
    }
  }

  // Direct stage.
  std::optional<PrimalState> direct_state;
  std::optional<DirectProblem> direct;
  if (scenario.stages.direct && feasible) {
    try {
      EntropyOps ops = boltzmann ? make_entropy_ops(*model)
                                 : make_entropy_ops(*excl_model);
      direct.emplace(std::move(ops), op, psi_ext, scenario.E0, scenario.Q0);
      const FeasibilityCertificate cert = direct->feasible_point();
      DirectSolveOptions opts;
      opts.grad_tol = scenario.direct_tol;
      opts.max_iterations = scenario.direct_max_iterations;
      DirectSolveReport report = direct->maximize(cert.state, opts);
      write_state_csv(dir / "fields_direct.csv", report.state.c, report.state.u,
                      nullptr, overrides.emit_dat);
      if (!report.converged) {
        outcome.failures.push_back("direct stage did not converge");
      }

      json.key("direct");
      json.begin_object();
      json.kv("converged", report.converged);
      json.kv("iterations", report.iterations);
      json.kv("entropy", report.entropy);
      json.kv("eta", report.eta);
      json.kv("kappa", report.kappa);
      json.kv("projected_gradient_norm", report.projected_gradient_norm);
      json.kv("energy_residual", report.energy_residual);
      json.kv("charge_residual", report.charge_residual);
      json.kv("pass", report.converged);
      json.end_object();

      direct_state = std::move(report.state);
    } catch (const std::exception& e) {
      outcome.failures.push_back(std::string("direct: ") + e.what());
    }
  }

  // Route comparison.
  if (dual_result && direct_state && direct) {
    const CrossValidationReport cv =
        direct->cross_validate(*dual_result, *direct_state);
    JsonWriter cvjson;
    cvjson.begin_object();
    cvjson.kv("l1_gap_rel", cv.l1_gap_rel);
    cvjson.kv("linf_gap", cv.linf_gap);
    cvjson.kv("entropy_gap_rel", cv.entropy_gap_rel);
    cvjson.kv("l1_tolerance", cv.l1_tolerance);
    cvjson.kv("entropy_tolerance", cv.entropy_tolerance);
    cvjson.kv("pass", cv.pass);
    cvjson.end_object();
    write_text(dir / "crossval.json", cvjson.str() + "\n");

    json.key("cross_validation");
    json.begin_object();
    json.kv("l1_gap_rel", cv.l1_gap_rel);
    json.kv("linf_gap", cv.linf_gap);
    json.kv("entropy_gap_rel", cv.entropy_gap_rel);
    json.kv("pass", cv.pass);
    json.end_object();
    if (!cv.pass) outcome.failures.push_back("cross-validation gap too large");
  }

  // Evolution stage.
  if (scenario.stages.evolve && feasible) {
    if (!boltzmann) {
      outcome.failures.push_back("evolve: implemented for the boltzmann family");
    } else {
      try {
        ReactionNetwork network(scenario.reactions, scenario.charges,
                                scenario.single_conservation_law);
        EvolutionProblem evolution(*model, op, std::move(network),
                                   scenario.make_mobility(), psi_ext);
        EntropyOps ops = make_entropy_ops(*model);
        DirectProblem seed_problem(std::move(ops), op, psi_ext, scenario.E0,
                                   scenario.Q0);
        const PrimalState initial = seed_problem.feasible_point().state;

        EvolveOptions opts;
        opts.t_end = scenario.t_end;
        opts.dt_initial = scenario.dt_initial;
        opts.dt_max = scenario.dt_max;
        opts.distance_tol = scenario.distance_tol;
        opts.entropy_slack = scenario.entropy_slack;
        opts.snapshot_stride = scenario.snapshot_stride;
        // Without the certified single conservation law, diffusion-only or
        // degenerate networks preserve extra invariants and select a
        // different limit; the distance check is then meaningless.
        const EquilibriumResult* ref =
            dual_result && scenario.single_conservation_law
                ? &dual_result.value()
                : nullptr;
        Trajectory traj = evolution.evolve(initial, opts, ref);

        std::ostringstream tcsv;
        tcsv << "t,entropy,energy,charge,distance\n";
        tcsv.precision(17);
        for (std::size_t k = 0; k < traj.time.size(); ++k) {
          tcsv << traj.time[k] << "," << traj.entropy[k] << "," << traj.energy[k]
               << "," << traj.charge[k] << ",";
          if (!traj.distance.empty()) tcsv << traj.distance[k];
          tcsv << "\n";
        }
        write_text(dir / "trajectory.csv", tcsv.str());
        const PrimalState& final_state = traj.snapshots.back().second;
        write_state_csv(dir / "fields_evolution_final.csv", final_state.c,
                        final_state.u, nullptr, overrides.emit_dat);
        if (scenario.snapshot_stride > 0) {
          for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
            std::ostringstream name;
            name << "fields_evolution_" << std::setw(4) << std::setfill('0')
                 << k << ".csv";
            write_state_csv(dir / name.str(), traj.snapshots[k].second.c,
                            traj.snapshots[k].second.u, nullptr, false);
          }
        }

        const double slack =
            scenario.entropy_slack * (1.0 + std::abs(traj.entropy.front()));
        const bool entropy_ok = traj.min_entropy_increment >= -slack;
        const bool charge_ok =
            traj.max_charge_drift <= 1e-10 * (1.0 + std::abs(scenario.Q0));
        const bool energy_ok = traj.max_energy_drift_rel <= 1e-8;
        const bool converged =
            ref != nullptr ? traj.reached_distance_tol : true;
        const bool pass = entropy_ok && charge_ok && energy_ok && converged;
        if (!pass) outcome.failures.push_back("evolution stage checks failed");

        json.key("evolution");
        json.begin_object();
        json.kv("steps", traj.steps);
        json.kv("final_time", traj.time.back());
        json.kv("min_entropy_increment", traj.min_entropy_increment);
        json.kv("max_charge_drift", traj.max_charge_drift);
        json.kv("max_energy_drift_rel", traj.max_energy_drift_rel);
        if (!traj.distance.empty()) {
          json.kv("final_distance_rel", traj.distance.back());
        } else {
          json.kv_null("final_distance_rel");
        }
        json.kv("converged", converged);
        json.kv("pass", pass);
        json.end_object();
      } catch (const std::exception& e) {
        outcome.failures.push_back(std::string("evolve: ") + e.what());
      }
    }
  }

  outcome.pass = outcome.failures.empty();
  json.key("verdict");
  json.begin_object();
  json.kv("pass", outcome.pass);
  json.key("failures");
  json.begin_array();
  for (const std::string& f : outcome.failures) json.value(f);
  json.end_array();
  json.end_object();
  json.end_object();

  outcome.summary_json = json.str() + "\n";
  const fs::path summary_path = dir / "summary.json";
  write_text(summary_path, outcome.summary_json);
  outcome.summary_path = summary_path.string();
  return outcome;
}

namespace {

BoltzmannEntropyModel bipolar_unit_model() {
  return BoltzmannEntropyModel(2, 1.0, {1.0, 1.0}, 1.0, 0.5, {-1.0, 1.0});
}

SelfCheckItem check_conjugate_roundtrip(double tol) {
  SelfCheckItem item{"conjugate_roundtrip", true, ""};
  const BoltzmannEntropyModel model = bipolar_unit_model();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    PrimalPoint z{{unif(rng), unif(rng)}, unif(rng)};
    const DualVariables d = model.entropy_gradient(z);
    const PrimalPoint back = model.dual_entropy_gradient(d.y, d.v);
    double norm = std::abs(z.u);
    double err = std::abs(back.u - z.u);
    for (int i = 0; i < 2; ++i) {
      norm += std::abs(z.c[i]);
      err = std::max(err, std::abs(back.c[i] - z.c[i]));
    }
    worst = std::max(worst, err / (1.0 + norm));
  }
  item.pass = worst <= 1e-9 * tol;
  std::ostringstream os;
  os << "max relative roundtrip error " << worst;
  item.detail = os.str();
  return item;
}

SelfCheckItem check_dual_anchor(double tol) {
  SelfCheckItem item{"dual_anchor", true, ""};
  const BoltzmannEntropyModel model(1, 1.0, {1.0}, 1.0, 0.5, {1.0});
  const double closed = model.dual_entropy({0.0}, -1.0);
  auto neg_entropy = [&](const std::vector<double>& z) {
    return model.neg_entropy_extended(z);
  };
  OracleBox box;
  box.lo = {0.01, 0.01};
  box.hi = {20.0, 20.0};
  const double oracle = legendre_oracle(neg_entropy, {0.0, -1.0}, box, 3);
  item.pass = std::abs(closed - 5.0) <= 1e-12 * tol &&
              std::abs(oracle - 5.0) <= 1e-4 * tol;
  std::ostringstream os;
  os << "closed form " << closed << ", oracle " << oracle;
  item.detail = os.str();
  return item;
}

SelfCheckItem check_poisson_manufactured(double tol) {
  SelfCheckItem item{"poisson_manufactured", true, ""};
  const MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 101,
                                             BoundarySpec::dirichlet(),
                                             BoundarySpec::dirichlet());
  PoissonProblem problem{mesh, Field(mesh, 1.0), Field(mesh, 0.0), 0.0, 0.0};
  const AssembledOperator op = assemble(problem);
  const Field psi = solve_internal_potential(op, Field(mesh, 1.0));
  Field err(mesh);
  for (int j = 0; j < err.size(); ++j) {
    const double x = mesh->node(j);
    err[j] = psi[j] - 0.5 * x * (1.0 - x);
  }
  const double l2 = l2_norm(err);
  item.pass = l2 <= 1e-3 * tol;
  std::ostringstream os;
  os << "L2 error " << l2;
  item.detail = os.str();
  return item;
}

SelfCheckItem check_young_bound(double tol) {
  SelfCheckItem item{"young_bound", true, ""};
  const double c = young_lower_bound_constant(1.0, 1.0);
  const double margin = young_bound_min_margin(1.0, 2.0, 1.0, 50.0, 50.0, 100);
  const double at_equality = 1.0 / 1.0 - (c * 1.0 - 1.0);  // mu = eta = 1
  item.pass = std::abs(c - 2.0) <= 1e-14 * tol && margin >= -1e-12 * tol &&
              std::abs(at_equality) <= 1e-12 * tol;
  std::ostringstream os;
  os << "c_delta " << c << ", min margin " << margin;
  item.detail = os.str();
  return item;
}

SelfCheckItem check_min_energy_closed_form(double tol) {
  SelfCheckItem item{"min_energy_closed_form", true, ""};
  const MeshHandle mesh = build_uniform_mesh(0.0, 1.0, 41, BoundarySpec::robin(1.0),
                                             BoundarySpec::robin(1.0));
  PoissonProblem problem{mesh, Field(mesh, 1.0), Field(mesh, 0.0), 0.0, 0.0};
  const AssembledOperator op = assemble(problem);
  const MinimalEnergy v = min_electro_energy(op, 2.0, Field(mesh, 0.0));
  item.pass = v.kappa_star && std::abs(v.value - 1.0) <= 1e-12 * tol &&
              std::abs(*v.kappa_star - 1.0) <= 1e-12 * tol;
  std::ostringstream os;
  os << "V " << v.value;
  item.detail = os.str();
  return item;
}

SelfCheckItem check_moreau_monotone(double tol) {
  SelfCheckItem item{"moreau_monotone", true, ""};
  const BoltzmannEntropyModel model(1, 1.0, {1.0}, 1.0, 0.5, {1.0});
  const std::vector<double> z{1.5, 1.2};
  const double h = model.neg_entropy_extended(z);
  double prev = -1e300;
  bool grows = true;
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const double hd = moreau_envelope(model, z, delta);
    if (hd < prev || hd > h + 1e-12) grows = false;
    prev = hd;
  }
  item.pass = grows && std::abs(prev - h) <= 1e-2 * tol * (1.0 + std::abs(h));
  std::ostringstream os;
  os << "H " << h << ", H_delta(1e-3) " << prev;
  item.detail = os.str();
  return item;
}

}  // namespace

std::vector<SelfCheckItem> selfcheck(double tolerance_scale) {
  return {check_conjugate_roundtrip(tolerance_scale),
          check_dual_anchor(tolerance_scale),
          check_poisson_manufactured(tolerance_scale),
          check_young_bound(tolerance_scale),
          check_min_energy_closed_form(tolerance_scale),
          check_moreau_monotone(tolerance_scale)};
}

const std::string& summary_schema_v1() {
  static const std::string schema = R"JSON({
  "$id": "eerds-summary/1",
  "type": "object",
  "required": ["schema", "scenario", "stages_enabled", "verdict"],
  "properties": {
    "schema": {"type": "string"},
    "scenario": {
      "type": "object",
      "required": ["family", "species", "nodes", "case", "E0", "Q0", "seed"],
      "properties": {
        "family": {"type": "string"},
        "species": {"type": "number"},
        "nodes": {"type": "number"},
        "case": {"type": "string"},
        "E0": {"type": "number"},
        "Q0": {"type": "number"},
        "seed": {"type": "number"}
      }
    },
    "stages_enabled": {
      "type": "object",
      "required": ["electro", "dual", "direct", "evolve"],
      "properties": {
        "electro": {"type": "boolean"},
        "dual": {"type": "boolean"},
        "direct": {"type": "boolean"},
        "evolve": {"type": "boolean"}
      }
    },
    "electrostatics": {
      "type": "object",
      "required": ["V", "kappa_star", "feasible"],
      "properties": {
        "V": {"type": "number"},
        "kappa_star": {"type": ["number", "null"]},
        "feasible": {"type": "boolean"}
      }
    },
    "dual": {
      "type": "object",
      "required": ["converged", "iterations", "eta", "kappa", "theta",
                   "k_value", "gradient_norm", "entropy", "energy_residual",
                   "charge_residual", "theta_spread_rel", "zeta_defect",
                   "poisson_residual_rel", "uniqueness_gap", "pass"],
      "properties": {
        "converged": {"type": "boolean"},
        "iterations": {"type": "number"},
        "eta": {"type": "number"},
        "kappa": {"type": "number"},
        "theta": {"type": "number"},
        "k_value": {"type": "number"},
        "gradient_norm": {"type": "number"},
        "entropy": {"type": "number"},
        "energy_residual": {"type": "number"},
        "charge_residual": {"type": "number"},
        "theta_spread_rel": {"type": "number"},
        "zeta_defect": {"type": "number"},
        "poisson_residual_rel": {"type": "number"},
        "uniqueness_gap": {"type": "number"},
        "pass": {"type": "boolean"}
      }
    },
    "direct": {
      "type": "object",
      "required": ["converged", "iterations", "entropy", "eta", "kappa",
                   "projected_gradient_norm", "energy_residual",
                   "charge_residual", "pass"],
      "properties": {
        "converged": {"type": "boolean"},
        "iterations": {"type": "number"},
        "entropy": {"type": "number"},
        "eta": {"type": "number"},
        "kappa": {"type": "number"},
        "projected_gradient_norm": {"type": "number"},
        "energy_residual": {"type": "number"},
        "charge_residual": {"type": "number"},
        "pass": {"type": "boolean"}
      }
    },
    "cross_validation": {
      "type": "object",
      "required": ["l1_gap_rel", "linf_gap", "entropy_gap_rel", "pass"],
      "properties": {
        "l1_gap_rel": {"type": "number"},
        "linf_gap": {"type": "number"},
        "entropy_gap_rel": {"type": "number"},
        "pass": {"type": "boolean"}
      }
    },
    "evolution": {
      "type": "object",
      "required": ["steps", "final_time", "min_entropy_increment",
                   "max_charge_drift", "max_energy_drift_rel",
                   "final_distance_rel", "converged", "pass"],
      "properties": {
        "steps": {"type": "number"},
        "final_time": {"type": "number"},
        "min_entropy_increment": {"type": "number"},
        "max_charge_drift": {"type": "number"},
        "max_energy_drift_rel": {"type": "number"},
        "final_distance_rel": {"type": ["number", "null"]},
        "converged": {"type": "boolean"},
        "pass": {"type": "boolean"}
      }
    },
    "verdict": {
      "type": "object",
      "required": ["pass", "failures"],
      "properties": {
        "pass": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}}
      }
    }
  }
}
)JSON";
  return schema;
}

namespace {

bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

bool validate_node(const nlohmann::json& value, const nlohmann::json& schema,
                   const std::string& where, std::string* error) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(value, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& alt : t) ok = ok || type_matches(value, alt.get<std::string>());
    }
    if (!ok) {
      if (error) *error = where + ": type mismatch";
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& req : schema["required"]) {
        if (!value.contains(req.get<std::string>())) {
          if (error) *error = where + ": missing required key " + req.get<std::string>();
          return false;
        }
      }
    }
    if (schema.contains("properties")) {
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (schema["properties"].contains(it.key())) {
          if (!validate_node(it.value(), schema["properties"][it.key()],
                             where + "." + it.key(), error)) {
            return false;
          }
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    int index = 0;
    for (const auto& item : value) {
      if (!validate_node(item, schema["items"],
                         where + "[" + std::to_string(index++) + "]", error)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool validate_summary(const std::string& summary_json, const std::string& schema_json,
                      std::string* error) {
  nlohmann::json doc, schema;
  try {
    doc = nlohmann::json::parse(summary_json);
    schema = nlohmann::json::parse(schema_json);
  } catch (const std::exception& e) {
    if (error) *error = std::string("parse failure: ") + e.what();
    return false;
  }
  if (!doc.contains("schema") || doc["schema"] != schema.value("$id", "")) {
    if (error) *error = "schema id mismatch";
    return false;
  }
  return validate_node(doc, schema, "$", error);
}

}  // namespace eerds
