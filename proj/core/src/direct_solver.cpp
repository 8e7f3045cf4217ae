#include "eerds/direct_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eerds/linalg.hpp"

namespace eerds {

namespace {

// Boundary-of-cone evaluations are clamped here; forces stay finite and the
// multiplicative interior recovery of zero coordinates remains fast.
constexpr double kEvalFloor = 1e-13;
constexpr double kActiveFloor = 1e-12;

void gather(const PrimalState& z, int j, std::vector<double>& out) {
  const int species = z.c.species_count();
  out.resize(species + 1);
  for (int i = 0; i < species; ++i) out[i] = z.c.species(i)[j];
  out[species] = z.u[j];
}

}  // namespace

EntropyOps make_entropy_ops(const BoltzmannEntropyModel& model) {
  EntropyOps ops;
  ops.species = model.species_count();
  ops.charges = model.charges();
  ops.value = [&model](const std::vector<double>& z) {
    return model.neg_entropy_extended(z);
  };
  ops.gradient = [&model](const std::vector<double>& z) {
    return model.neg_entropy_gradient(z);
  };
  ops.hessian = [&model](const std::vector<double>& z) {
    return model.neg_entropy_hessian(z);
  };
  ops.prox = [&model](const std::vector<double>& z, double delta) {
    return proximal_point(model, z, delta);
  };
  ops.clip_to_domain = [](std::vector<double>& z) {
    for (double& v : z) v = std::max(v, 0.0);
  };
  return ops;
}

EntropyOps make_entropy_ops(const SizeExclusionEntropyModel& model) {
  EntropyOps ops;
  ops.species = model.species_count();
  ops.charges = model.charges();
  ops.value = [&model](const std::vector<double>& z) {
    return model.neg_entropy_extended(z);
  };
  ops.gradient = [&model](const std::vector<double>& z) {
    return model.neg_entropy_gradient(z);
  };
  ops.hessian = [&model](const std::vector<double>& z) {
    return model.neg_entropy_hessian(z);
  };
  ops.prox = [&model](const std::vector<double>& z, double delta) {
    return proximal_point(model, z, delta);
  };
  ops.clip_to_domain = [&model](std::vector<double>& z) {
    const int n = static_cast<int>(z.size());
    for (double& v : z) v = std::max(v, 0.0);
    const double wu = model.w(z[n - 1]);
    double csum = 0.0;
    for (int i = 0; i < n - 1; ++i) csum += z[i];
    if (csum > 0.0 && csum >= wu) {
      const double scale = wu > 0.0 ? 0.999999 * wu / csum : 0.0;
      for (int i = 0; i < n - 1; ++i) z[i] *= scale;
    }
  };
  return ops;
}

DirectProblem::DirectProblem(EntropyOps ops, const AssembledOperator& op,
                             Field psi_ext, double E0, double Q0)
    : ops_(std::move(ops)),
      op_(op),
      psi_ext_(std::move(psi_ext)),
      E0_(E0),
      Q0_(Q0) {
  if (op_.classification() == BoundaryCase::PureNeumann && Q0_ != 0.0) {
    throw std::invalid_argument("DirectProblem: pure Neumann case requires Q0 = 0");
  }
  V_ = min_electro_energy(op_, Q0_, psi_ext_).value;
  if (!(E0_ > V_)) throw InfeasibleScenario(E0_, V_);
  for (int i = 0; i < ops_.species; ++i) {
    const double q = ops_.charges[i];
    if (q > 0.0 && (pos_species_ < 0 || q > ops_.charges[pos_species_])) {
      pos_species_ = i;
    }
    if (q < 0.0 && (neg_species_ < 0 || q < ops_.charges[neg_species_])) {
      neg_species_ = i;
    }
  }
}

double DirectProblem::entropy_total(const PrimalState& z) const {
  const Mesh& mesh = *op_.mesh();
  std::vector<double> node;
  double s = 0.0;
  for (int j = 0; j < mesh.node_count(); ++j) {
    gather(z, j, node);
    s -= mesh.weight(j) * ops_.value(node);
  }
  return s;
}

double DirectProblem::energy_total(const PrimalState& z) const {
  return total_energy(op_, z.c, z.u, psi_ext_);
}

double DirectProblem::charge_total(const PrimalState& z) const {
  return total_charge(z.c);
}

void DirectProblem::repair_charge(PrimalState& z) const {
  const double measure = op_.mesh()->domain_measure();
  double defect = Q0_ - charge_total(z);
  if (defect == 0.0) return;
  if (defect > 0.0) {
    if (pos_species_ < 0) {
      throw std::runtime_error("repair_charge: no positively charged species");
    }
    const double add = defect / (ops_.charges[pos_species_] * measure);
    for (int j = 0; j < z.u.size(); ++j) z.c.species(pos_species_)[j] += add;
  } else {
    if (neg_species_ < 0) {
      throw std::runtime_error("repair_charge: no negatively charged species");
    }
    const double add = defect / (ops_.charges[neg_species_] * measure);
    for (int j = 0; j < z.u.size(); ++j) z.c.species(neg_species_)[j] += add;
  }
}

void DirectProblem::repair_energy(PrimalState& z) const {
  const Mesh& mesh = *op_.mesh();
  const double measure = mesh.domain_measure();
  double gap = E0_ - energy_total(z);
  if (gap >= 0.0) {
    const double add = gap / measure;
    for (int j = 0; j < z.u.size(); ++j) z.u[j] += add;
    return;
  }
  // Drain |gap| of internal energy without leaving the nonnegative cone.
  double lo = 0.0, hi = linf_norm(z.u);
  auto drained = [&](double s) {
    double total = 0.0;
    for (int j = 0; j < z.u.size(); ++j) {
      total += mesh.weight(j) * std::max(z.u[j] - s, 0.0);
    }
    return total;
  };
  const double target = integrate(z.u) + gap;
  if (target <= 0.0) {
    z.u.fill(0.0);
    return;
  }
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (drained(mid) > target ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  for (int j = 0; j < z.u.size(); ++j) z.u[j] = std::max(z.u[j] - s, 0.0);
  // Kill the bisection remainder with a constant shift when safe.
  const double rest = E0_ - energy_total(z);
  if (rest > 0.0) {
    for (int j = 0; j < z.u.size(); ++j) z.u[j] += rest / measure;
  }
}

FeasibilityCertificate DirectProblem::feasible_point() const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();

  // Least-energy charge profile of total charge Q0, as a nodal density.
  std::vector<double> load(n, 0.0);
  const std::vector<double> l_psi_ext = op_.apply(psi_ext_);
  switch (op_.classification()) {
    case BoundaryCase::PureRobin: {
      const double kappa = min_electro_energy(op_, Q0_, psi_ext_).kappa_star.value();
      Field level(op_.mesh(), kappa);
      level -= psi_ext_;
      load = op_.apply(level);
      break;
    }
    case BoundaryCase::SomeDirichlet: {
      double interior_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (op_.is_dirichlet_node(j)) continue;
        load[j] = -l_psi_ext[j];
        interior_sum += load[j];
      }
      int n_dirichlet = 0;
      for (int j = 0; j < n; ++j) n_dirichlet += op_.is_dirichlet_node(j) ? 1 : 0;
      for (int j = 0; j < n; ++j) {
        if (op_.is_dirichlet_node(j)) {
          load[j] = (Q0_ - interior_sum) / n_dirichlet;
        }
      }
      break;
    }
    case BoundaryCase::PureNeumann: {
      for (int j = 0; j < n; ++j) load[j] = -l_psi_ext[j];
      break;
    }
  }

  Field rho(op_.mesh(), 0.0);
  for (int j = 0; j < n; ++j) rho[j] = load[j] / mesh.weight(j);

  PrimalState z;
  z.c = SpeciesField(op_.mesh(), ops_.species, ops_.charges);
  z.u = Field(op_.mesh(), 0.0);
  double rho_scale = 0.0;
  for (int j = 0; j < n; ++j) {
    if (rho[j] > 0.0) {
      if (pos_species_ < 0) {
        throw std::runtime_error(
            "feasible_point: positive charge not representable by the species");
      }
      z.c.species(pos_species_)[j] = rho[j] / ops_.charges[pos_species_];
    } else if (rho[j] < 0.0) {
      if (neg_species_ < 0) {
        throw std::runtime_error(
            "feasible_point: negative charge not representable by the species");
      }
      z.c.species(neg_species_)[j] = rho[j] / ops_.charges[neg_species_];
    }
    rho_scale = std::max(rho_scale, std::abs(rho[j]));
  }
  // Charge-neutral positive floor keeps the gradients finite at the start.
  if (pos_species_ >= 0 && neg_species_ >= 0) {
    const double floor = 1e-8 * (1.0 + rho_scale);
    for (int j = 0; j < n; ++j) {
      z.c.species(pos_species_)[j] += floor / ops_.charges[pos_species_];
      z.c.species(neg_species_)[j] += floor / (-ops_.charges[neg_species_]);
    }
  }

  const double electro = energy_total(z);  // u = 0 so this is the field part
  if (electro > E0_) {
    throw InfeasibleScenario(E0_, electro);
  }
  z.u.fill((E0_ - electro) / mesh.domain_measure());
  repair_energy(z);

  FeasibilityCertificate cert;
  cert.state = std::move(z);
  cert.energy_residual = std::abs(energy_total(cert.state) - E0_);
  cert.charge_residual = std::abs(charge_total(cert.state) - Q0_);
  return cert;
}

PrimalState DirectProblem::repaired_midpoint(const PrimalState& a,
                                             const PrimalState& b) const {
  PrimalState mid;
  mid.c = SpeciesField(op_.mesh(), ops_.species, ops_.charges);
  mid.u = Field(op_.mesh(), 0.0);
  for (int i = 0; i < ops_.species; ++i) {
    for (int j = 0; j < mid.u.size(); ++j) {
      mid.c.species(i)[j] = 0.5 * (a.c.species(i)[j] + b.c.species(i)[j]);
    }
  }
  for (int j = 0; j < mid.u.size(); ++j) {
    mid.u[j] = 0.5 * (a.u[j] + b.u[j]);
  }
  repair_energy(mid);  // convexity of the energy leaves a nonnegative gap
  return mid;
}

DirectSolveReport DirectProblem::ascend(const PrimalState& start,
                                        const DirectSolveOptions& opts,
                                        double delta) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = ops_.species;
  const int dim = species + 1;
  const bool smoothed = delta > 0.0;

  PrimalState z = start;
  if (!smoothed) {
    std::vector<double> node;
    for (int j = 0; j < n; ++j) {
      gather(z, j, node);
      ops_.clip_to_domain(node);
      for (int i = 0; i < species; ++i) z.c.species(i)[j] = node[i];
      z.u[j] = node[species];
    }
  }
  repair_charge(z);
  repair_energy(z);

  auto objective = [&](const PrimalState& s) {
    if (!smoothed) return entropy_total(s);
    std::vector<double> node;
    double val = 0.0;
    for (int j = 0; j < n; ++j) {
      gather(s, j, node);
      const std::vector<double> p = ops_.prox(node, delta);
      double h = ops_.value(p);
      for (int i = 0; i < dim; ++i) {
        h += (node[i] - p[i]) * (node[i] - p[i]) / (2.0 * delta);
      }
      val -= mesh.weight(j) * h;
    }
    return val;
  };

  double objective_value = objective(z);
  DirectSolveReport report;
  double step = 1.0;
  double damping = 1.0;
  double pg_prev = 1e300;
  double eta_prev = 0.0;

  // Diagonal of the inverse potential operator: the nodewise share of the
  // electrostatic curvature entering the search metric.
  std::vector<double> green_diag(n, 0.0);
  if (op_.classification() != BoundaryCase::PureNeumann) {
    std::vector<double> unit(n, 0.0);
    for (int j = 0; j < n; ++j) {
      unit[j] = 1.0;
      if (!op_.is_dirichlet_node(j)) green_diag[j] = op_.solve_load(unit)[j];
      unit[j] = 0.0;
    }
  }

  std::vector<double> node(dim), grad_s(dim);
  std::vector<std::vector<double>> pi(n, std::vector<double>(dim));
  std::vector<std::vector<double>> dir(n, std::vector<double>(dim));

  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    const Field rho = z.c.charge_density();
    Field psi = solve_internal_potential(op_, rho);
    psi += psi_ext_;

    // Pointwise entropy gradient and curvature; clamped evaluation keeps
    // both finite on the boundary of the cone.
    std::vector<std::vector<double>> inv_s(n), inv_e(n), inv_q(n);
    double m00 = 0.0, m01 = 0.0, m11 = 0.0, r0 = 0.0, r1 = 0.0;
    double gs_norm_sq = 0.0;
    std::vector<double> g_energy(dim), g_charge(dim);
    for (int j = 0; j < n; ++j) {
      gather(z, j, node);
      std::vector<double> hess;
      if (!smoothed) {
        for (double& v : node) v = std::max(v, kEvalFloor);
        ops_.clip_to_domain(node);
        for (double& v : node) v = std::max(v, kEvalFloor);
        const std::vector<double> h = ops_.gradient(node);
        for (int i = 0; i < dim; ++i) grad_s[i] = -h[i];
        hess = ops_.hessian(node);
      } else {
        const std::vector<double> p = ops_.prox(node, delta);
        for (int i = 0; i < dim; ++i) grad_s[i] = -(node[i] - p[i]) / delta;
        hess = ops_.hessian(p);
        // Curvature of the envelope: Hess H (I + delta Hess H)^{-1}.
        std::vector<double> m_mat(hess);
        for (int i = 0; i < dim * dim; ++i) m_mat[i] *= delta;
        for (int i = 0; i < dim; ++i) m_mat[i * dim + i] += 1.0;
        std::vector<double> x(dim * dim, 0.0);
        for (int col = 0; col < dim; ++col) {
          std::vector<double> rhs(dim), a_copy(m_mat);
          for (int i = 0; i < dim; ++i) rhs[i] = hess[i * dim + col];
          if (!cholesky_solve_small(dim, a_copy, rhs)) {
            rhs.assign(dim, 0.0);
            rhs[col] = 1.0 / delta;
          }
          for (int i = 0; i < dim; ++i) x[i * dim + col] = rhs[i];
        }
        hess = std::move(x);
        for (int i = 0; i < dim; ++i) {
          for (int k = 0; k < i; ++k) {
            const double sym = 0.5 * (hess[i * dim + k] + hess[k * dim + i]);
            hess[i * dim + k] = hess[k * dim + i] = sym;
          }
          hess[i * dim + i] += 1e-12;
        }
      }

      for (int i = 0; i < species; ++i) {
        g_energy[i] = ops_.charges[i] * psi[j];
        g_charge[i] = ops_.charges[i];
      }
      g_energy[species] = 1.0;
      g_charge[species] = 0.0;

      const double curv = std::max(eta_prev, 0.0) * mesh.weight(j) * green_diag[j];
      if (curv > 0.0) {
        for (int i = 0; i < species; ++i) {
          for (int k = 0; k < species; ++k) {
            hess[i * dim + k] += curv * ops_.charges[i] * ops_.charges[k];
          }
        }
      }

      inv_s[j] = grad_s;
      inv_e[j] = g_energy;
      inv_q[j] = g_charge;
      {
        std::vector<double> a_copy(hess);
        if (!cholesky_solve_small(dim, a_copy, inv_s[j])) inv_s[j] = grad_s;
      }
      {
        std::vector<double> a_copy(hess);
        if (!cholesky_solve_small(dim, a_copy, inv_e[j])) inv_e[j] = g_energy;
      }
      {
        std::vector<double> a_copy(hess);
        if (!cholesky_solve_small(dim, a_copy, inv_q[j])) inv_q[j] = g_charge;
      }

      const double m = mesh.weight(j);
      for (int i = 0; i < dim; ++i) {
        pi[j][i] = grad_s[i];
        gs_norm_sq += m * grad_s[i] * grad_s[i];
        m00 += m * g_energy[i] * inv_e[j][i];
        m01 += m * g_energy[i] * inv_q[j][i];
        m11 += m * g_charge[i] * inv_q[j][i];
        r0 += m * g_energy[i] * inv_s[j][i];
        r1 += m * g_charge[i] * inv_s[j][i];
      }
    }

    // Multipliers of the curvature-metric tangential projection.
    double eta = 0.0, kappa = 0.0;
    const double det = m00 * m11 - m01 * m01;
    if (std::abs(det) > 1e-14 * (1.0 + std::abs(m00 * m11))) {
      eta = (r0 * m11 - r1 * m01) / det;
      kappa = (m00 * r1 - m01 * r0) / det;
    } else if (m00 > 0.0) {
      eta = r0 / m00;
    }

    // Residual of the multiplier rule, projected onto the active cone.
    double pg_norm_sq = 0.0;
    for (int j = 0; j < n; ++j) {
      gather(z, j, node);
      const double m = mesh.weight(j);
      for (int i = 0; i < dim; ++i) {
        const double ge = i < species ? ops_.charges[i] * psi[j] : 1.0;
        const double gq = i < species ? ops_.charges[i] : 0.0;
        double r = pi[j][i] - eta * ge - kappa * gq;
        if (!smoothed && node[i] <= kActiveFloor && r < 0.0) r = 0.0;
        pi[j][i] = r;
        pg_norm_sq += m * r * r;
        dir[j][i] = inv_s[j][i] - eta * inv_e[j][i] - kappa * inv_q[j][i];
      }
    }
    const double pg_norm = std::sqrt(pg_norm_sq);
    const double scale = 1.0 + std::sqrt(gs_norm_sq);

    report.iterations = iter;
    report.projected_gradient_norm = pg_norm;
    report.multiplier_residual = pg_norm;
    report.eta = eta;
    report.kappa = kappa;
    if (pg_norm <= opts.grad_tol * scale) {
      report.converged = true;
      break;
    }
    if (iter == opts.max_iterations) break;
    eta_prev = eta;
    if (pg_norm > 0.9 * pg_prev) {
      damping = std::max(damping * 0.5, 1.0 / 64.0);
    } else {
      damping = std::min(damping * 1.25, 1.0);
    }
    pg_prev = pg_norm;

    double slope = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < dim; ++i) slope += mesh.weight(j) * pi[j][i] * dir[j][i];
    }
    if (!(slope > 0.0)) {
      for (int j = 0; j < n; ++j) dir[j] = pi[j];
      slope = pg_norm_sq;
    }

    const double u_floor =
        smoothed ? -1e300 : 1e-10 * (1.0 + std::abs(E0_) / mesh.domain_measure());
    double t = std::min(2.0 * step, damping);
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      PrimalState trial = z;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < species; ++i) {
          trial.c.species(i)[j] += t * dir[j][i];
        }
        trial.u[j] += t * dir[j][species];
        if (!smoothed) {
          gather(trial, j, node);
          ops_.clip_to_domain(node);
          for (int i = 0; i < species; ++i) trial.c.species(i)[j] = node[i];
          trial.u[j] = node[species];
        }
      }
      repair_charge(trial);
      repair_energy(trial);
      // Keep the internal energy away from the cone boundary; the optimizer
      // is interior in u, so an overdrained repair means the step was too big.
      double u_min = trial.u[0];
      for (int j = 1; j < n; ++j) u_min = std::min(u_min, trial.u[j]);
      if (u_min < u_floor) {
        t *= 0.5;
        continue;
      }
      const double ft = objective(trial);
      if (std::isfinite(ft) &&
          ft >= objective_value + 1e-4 * t * slope - 1e-14 * (1.0 + std::abs(objective_value))) {
        z = std::move(trial);
        objective_value = ft;
        accepted = true;
        step = t;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  report.state = std::move(z);
  report.entropy = entropy_total(report.state);
  report.energy_residual = std::abs(energy_total(report.state) - E0_);
  report.charge_residual = std::abs(charge_total(report.state) - Q0_);
  return report;
}

DirectSolveReport DirectProblem::maximize(const PrimalState& start,
                                          const DirectSolveOptions& opts) const {
  return ascend(start, opts, 0.0);
}

DirectSolveReport DirectProblem::maximize_regularized(
    double delta, const PrimalState& start, const DirectSolveOptions& opts) const {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("maximize_regularized: delta must be in (0, 1]");
  }
  return ascend(start, opts, delta);
}

CrossValidationReport DirectProblem::cross_validate(const EquilibriumResult& dual,
                                                    const PrimalState& primal,
                                                    double l1_tol,
                                                    double entropy_tol) const {
  if (dual.u.mesh().get() != primal.u.mesh().get()) {
    throw std::invalid_argument("cross_validate: states on different meshes");
  }
  if (dual.c.species_count() != primal.c.species_count()) {
    throw std::invalid_argument("cross_validate: species count mismatch");
  }

  CrossValidationReport r;
  r.l1_tolerance = l1_tol;
  r.entropy_tolerance = entropy_tol;

  double gap_l1 = 0.0, ref_l1 = 0.0, gap_inf = 0.0;
  for (int i = 0; i < dual.c.species_count(); ++i) {
    Field diff = dual.c.species(i);
    diff -= primal.c.species(i);
    gap_l1 += l1_norm(diff);
    gap_inf = std::max(gap_inf, linf_norm(diff));
    ref_l1 += l1_norm(dual.c.species(i));
  }
  Field du = dual.u;
  du -= primal.u;
  gap_l1 += l1_norm(du);
  gap_inf = std::max(gap_inf, linf_norm(du));
  ref_l1 += l1_norm(dual.u);

  r.l1_gap_rel = gap_l1 / (1.0 + ref_l1);
  r.linf_gap = gap_inf;

  const double s_primal = entropy_total(primal);
  r.entropy_gap_rel = std::abs(dual.entropy - s_primal) / (1.0 + std::abs(dual.entropy));

  r.dual_energy_residual = dual.diagnostics.energy_residual;
  r.dual_charge_residual = dual.diagnostics.charge_residual;
  r.primal_energy_residual = std::abs(energy_total(primal) - E0_);
  r.primal_charge_residual = std::abs(charge_total(primal) - Q0_);
  r.pass = r.l1_gap_rel <= l1_tol && r.entropy_gap_rel <= entropy_tol;
  return r;
}

}  // namespace eerds
