#include "eerds/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eerds {

namespace {

struct NodeEvals {
  std::vector<ReducedDualEval> at;
  double sum_value = 0.0;
  double sum_dmu = 0.0;
  double sum_deta = 0.0;
  double sum_dmumu = 0.0;
  double sum_dmueta = 0.0;
  double sum_detaeta = 0.0;
};

NodeEvals evaluate_nodes(const BoltzmannEntropyModel& model, const Mesh& mesh,
                         const DualPoint& d, double delta) {
  NodeEvals ev;
  const int n = mesh.node_count();
  ev.at.resize(n);
  for (int j = 0; j < n; ++j) {
    const double m = mesh.weight(j);
    const ReducedDualEval r =
        model.reduced_dual(d.kappa + d.lambda[j], d.eta, delta);
    ev.at[j] = r;
    ev.sum_value += m * r.value;
    ev.sum_dmu += m * r.d_mu;
    ev.sum_deta += m * r.d_eta;
    ev.sum_dmumu += m * r.d_mumu;
    ev.sum_dmueta += m * r.d_mueta;
    ev.sum_detaeta += m * r.d_etaeta;
  }
  return ev;
}

}  // namespace

InfeasibleScenario::InfeasibleScenario(double E0, double V)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "infeasible data: E0 = " << E0
            << " does not exceed the minimal electrostatic energy V = " << V;
        return msg.str();
      }()),
      V_(V) {}

DualProblem::DualProblem(const BoltzmannEntropyModel& model,
                         const AssembledOperator& op, Field psi_ext, double E0,
                         double Q0, double delta)
    : model_(model),
      op_(op),
      psi_ext_(std::move(psi_ext)),
      E0_(E0),
      Q0_(Q0),
      delta_(delta) {
  if (model_.species_count() != static_cast<int>(model_.charges().size())) {
    throw std::invalid_argument("DualProblem: inconsistent model");
  }
  if (op_.classification() == BoundaryCase::PureNeumann && Q0_ != 0.0) {
    throw std::invalid_argument("DualProblem: pure Neumann case requires Q0 = 0");
  }
  if (delta_ < 0.0 || delta_ > 1.0) {
    throw std::invalid_argument("DualProblem: delta must lie in [0, 1]");
  }
  V_ = min_electro_energy(op_, Q0_, psi_ext_).value;
  if (!(E0_ > V_)) throw InfeasibleScenario(E0_, V_);
}

Field DualProblem::zero_lambda() const { return Field(op_.mesh(), 0.0); }

void DualProblem::project(Field& lambda) const {
  const Mesh& m = *op_.mesh();
  switch (op_.classification()) {
    case BoundaryCase::SomeDirichlet:
      for (int j = 0; j < lambda.size(); ++j) {
        if (op_.is_dirichlet_node(j)) lambda[j] = 0.0;
      }
      break;
    case BoundaryCase::PureNeumann: {
      double mean = 0.0;
      for (int j = 0; j < lambda.size(); ++j) mean += m.weight(j) * lambda[j];
      mean /= m.domain_measure();
      for (int j = 0; j < lambda.size(); ++j) lambda[j] -= mean;
      break;
    }
    case BoundaryCase::PureRobin:
      break;
  }
}

double DualProblem::k_value(const DualPoint& d) const {
  if (!(d.eta > 0.0)) throw std::domain_error("k_value: requires eta > 0");
  const Mesh& mesh = *op_.mesh();
  double s = d.kappa * Q0_ + d.eta * E0_;
  for (int j = 0; j < mesh.node_count(); ++j) {
    s += mesh.weight(j) *
         model_.reduced_dual(d.kappa + d.lambda[j], d.eta, delta_).value;
  }
  s -= op_.bilinear(d.lambda, psi_ext_);
  s += 0.5 * op_.quadratic(d.lambda) / d.eta;
  return s;
}

KGradient DualProblem::k_gradient(const DualPoint& d) const {
  if (!(d.eta > 0.0)) throw std::domain_error("k_gradient: requires eta > 0");
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const NodeEvals ev = evaluate_nodes(model_, mesh, d, delta_);

  KGradient g;
  const double b_lambda = op_.quadratic(d.lambda);
  g.d_eta = ev.sum_deta + E0_ - 0.5 * b_lambda / (d.eta * d.eta);
  g.d_kappa = ev.sum_dmu + Q0_;

  Field work = d.lambda;
  work *= 1.0 / d.eta;
  work -= psi_ext_;
  std::vector<double> lw = op_.apply(work);

  std::vector<double> dual(n, 0.0);
  for (int j = 0; j < n; ++j) {
    dual[j] = mesh.weight(j) * ev.at[j].d_mu + lw[j];
  }
  switch (op_.classification()) {
    case BoundaryCase::SomeDirichlet:
      for (int j = 0; j < n; ++j) {
        if (op_.is_dirichlet_node(j)) dual[j] = 0.0;
      }
      break;
    case BoundaryCase::PureNeumann: {
      double sum = 0.0;
      for (double v : dual) sum += v;
      const double shift = sum / mesh.domain_measure();
      for (int j = 0; j < n; ++j) dual[j] -= shift * mesh.weight(j);
      break;
    }
    case BoundaryCase::PureRobin:
      break;
  }

  g.d_lambda = Field(op_.mesh(), 0.0);
  double lam_norm_sq = 0.0;
  for (int j = 0; j < n; ++j) {
    g.d_lambda[j] = dual[j] / mesh.weight(j);
    lam_norm_sq += dual[j] * dual[j] / mesh.weight(j);
  }
  g.norm = std::abs(g.d_eta) + std::abs(g.d_kappa) + std::sqrt(lam_norm_sq);
  return g;
}

DualPoint DualProblem::initial_point() const {
  const double ubar = E0_ / op_.mesh()->domain_measure();
  auto u_of = [&](double log_eta) {
    return -model_.reduced_dual(0.0, std::exp(log_eta), 0.0).d_eta;
  };
  double lo = -10.0, hi = 10.0;
  while (u_of(lo) < ubar && lo > -300.0) lo -= 10.0;
  while (u_of(hi) > ubar && hi < 300.0) hi += 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (u_of(mid) > ubar ? lo : hi) = mid;
  }
  DualPoint d;
  d.eta = std::exp(0.5 * (lo + hi));
  d.kappa = 0.0;
  d.lambda = zero_lambda();
  return d;
}

DualSolveReport DualProblem::minimize(const DualPoint& initial,
                                      const DualSolveOptions& opts) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();

  // In the pure Neumann case a constant shift of lambda compensated by
  // kappa is a gauge direction of the objective; the zero-mean constraint
  // fixes it, so shifts are always moved into kappa.
  auto gauge_fix = [&](DualPoint& p) {
    if (op_.classification() != BoundaryCase::PureNeumann) {
      project(p.lambda);
      return;
    }
    double mean = 0.0;
    for (int j = 0; j < p.lambda.size(); ++j) {
      mean += op_.mesh()->weight(j) * p.lambda[j];
    }
    mean /= op_.mesh()->domain_measure();
    for (int j = 0; j < p.lambda.size(); ++j) p.lambda[j] -= mean;
    p.kappa += mean;
  };

  DualPoint x = initial;
  gauge_fix(x);
  if (!(x.eta > 0.0)) throw std::domain_error("minimize: initial eta must be positive");

  // Free dofs form one contiguous node range in 1D.
  int lo = 0, hi = n - 1;
  if (op_.classification() == BoundaryCase::SomeDirichlet) {
    if (op_.is_dirichlet_node(0)) lo = 1;
    if (op_.is_dirichlet_node(n - 1)) hi = n - 2;
  }
  const int fn = hi - lo + 1;

  DualSolveReport report;
  double f = k_value(x);

  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    const NodeEvals ev = evaluate_nodes(model_, mesh, x, delta_);
    const double eta = x.eta;
    const double b_lambda = op_.quadratic(x.lambda);

    const double k_eta = ev.sum_deta + E0_ - 0.5 * b_lambda / (eta * eta);
    const double k_kappa = ev.sum_dmu + Q0_;

    Field work = x.lambda;
    work *= 1.0 / eta;
    work -= psi_ext_;
    const std::vector<double> lw = op_.apply(work);
    const std::vector<double> llam = op_.matrix().multiply(x.lambda.values());

    std::vector<double> g_lam(fn);
    for (int i = 0; i < fn; ++i) {
      g_lam[i] = mesh.weight(lo + i) * ev.at[lo + i].d_mu + lw[lo + i];
    }
    if (op_.classification() == BoundaryCase::PureNeumann) {
      double sum = 0.0;
      for (double v : g_lam) sum += v;
      const double shift = sum / mesh.domain_measure();
      for (int i = 0; i < fn; ++i) g_lam[i] -= shift * mesh.weight(lo + i);
    }

    double lam_norm_sq = 0.0;
    for (int i = 0; i < fn; ++i) {
      lam_norm_sq += g_lam[i] * g_lam[i] / mesh.weight(lo + i);
    }
    const double grad_norm =
        std::abs(k_eta) + std::abs(k_kappa) + std::sqrt(lam_norm_sq);

    report.iterations = iter;
    report.gradient_norm = grad_norm;
    report.k_value = f;
    if (opts.record_trace) {
      report.trace.push_back({iter, f, grad_norm, 0.0});
    }
    if (grad_norm <= opts.grad_tol * gradient_scale()) {
      report.converged = true;
      break;
    }
    if (iter == opts.max_iterations) break;

    // Curvature blocks in (log eta, kappa, lambda) coordinates.
    const double k_etaeta = ev.sum_detaeta + b_lambda / (eta * eta * eta);
    const double k_etakappa = ev.sum_dmueta;
    const double k_kappakappa = ev.sum_dmumu;
    const double g_s = eta * k_eta;
    const double h_ss = eta * eta * k_etaeta + eta * k_eta;
    const double h_sk = eta * k_etakappa;

    std::vector<double> h_lam_s(fn), h_lam_k(fn);
    for (int i = 0; i < fn; ++i) {
      const int j = lo + i;
      h_lam_s[i] =
          eta * (mesh.weight(j) * ev.at[j].d_mueta - llam[j] / (eta * eta));
      h_lam_k[i] = mesh.weight(j) * ev.at[j].d_mumu;
    }

    std::vector<double> d_lam(fn, 0.0);
    double d_s = 0.0, d_k = 0.0;
    bool have_direction = false;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 8 && !have_direction; ++attempt) {
      std::vector<double> t_diag(fn), t_off(fn - 1);
      for (int i = 0; i < fn; ++i) {
        const int j = lo + i;
        t_diag[i] = op_.matrix().diag(j) / eta +
                    mesh.weight(j) * ev.at[j].d_mumu + ridge * mesh.weight(j);
      }
      for (int i = 0; i + 1 < fn; ++i) t_off[i] = op_.matrix().off(lo + i) / eta;
      SymTridiagonal t(std::move(t_diag), std::move(t_off));
      if (!t.factor()) {
        ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
        continue;
      }
      const std::vector<double> x1 = t.solve(h_lam_s);
      const std::vector<double> x2 = t.solve(h_lam_k);
      const std::vector<double> y = t.solve(g_lam);

      const double s00 = h_ss + ridge - dot(h_lam_s, x1);
      const double s01 = h_sk - dot(h_lam_s, x2);
      const double s11 = k_kappakappa + ridge - dot(h_lam_k, x2);
      const double det = s00 * s11 - s01 * s01;
      if (!(s00 > 0.0) || !(det > 0.0)) {
        ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
        continue;
      }
      const double r0 = -g_s + dot(h_lam_s, y);
      const double r1 = -k_kappa + dot(h_lam_k, y);
      d_s = (r0 * s11 - r1 * s01) / det;
      d_k = (s00 * r1 - s01 * r0) / det;
      for (int i = 0; i < fn; ++i) {
        d_lam[i] = -y[i] - x1[i] * d_s - x2[i] * d_k;
      }
      double slope = g_s * d_s + k_kappa * d_k + dot(g_lam, d_lam);
      if (slope < 0.0) {
        have_direction = true;
      } else {
        ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
      }
    }
    if (!have_direction) {
      // Steepest descent in the lumped metric.
      d_s = -g_s;
      d_k = -k_kappa;
      for (int i = 0; i < fn; ++i) d_lam[i] = -g_lam[i] / mesh.weight(lo + i);
    }

    double slope = g_s * d_s + k_kappa * d_k + dot(g_lam, d_lam);
    double t_step = 1.0;
    if (std::abs(d_s) * t_step > 20.0) t_step = 20.0 / std::abs(d_s);

    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      DualPoint trial = x;
      trial.eta = eta * std::exp(t_step * d_s);
      trial.kappa = x.kappa + t_step * d_k;
      for (int i = 0; i < fn; ++i) trial.lambda[lo + i] = x.lambda[lo + i] + t_step * d_lam[i];
      gauge_fix(trial);
      double ft;
      try {
        ft = k_value(trial);
      } catch (const std::domain_error&) {
        t_step *= 0.5;
        continue;
      }
      if (std::isfinite(ft) &&
          ft <= f + 1e-4 * t_step * slope + 1e-14 * (1.0 + std::abs(f))) {
        x = std::move(trial);
        f = ft;
        accepted = true;
        break;
      }
      t_step *= 0.5;
    }
    if (opts.record_trace && !report.trace.empty()) {
      report.trace.back().step_size = accepted ? t_step : 0.0;
    }
    if (!accepted) break;  // stalled; gradient norm reported as is
  }

  report.point = x;
  return report;
}

EquilibriumResult DualProblem::recover(const DualPoint& d) const {
  if (!(d.eta > 0.0)) throw std::domain_error("recover: requires eta > 0");
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();

  EquilibriumResult r;
  r.c = SpeciesField(op_.mesh(), species, model_.charges());
  r.u = Field(op_.mesh(), 0.0);
  r.Psi = d.lambda;
  r.Psi *= 1.0 / d.eta;
  r.eta = d.eta;
  r.kappa = d.kappa;
  r.theta = 1.0 / d.eta;

  std::vector<double> y(species);
  double entropy = 0.0;
  for (int j = 0; j < n; ++j) {
    const double mu = d.kappa + d.lambda[j];
    for (int i = 0; i < species; ++i) y[i] = -mu * model_.charges()[i];
    const PrimalPoint z = model_.dual_entropy_gradient(y, -d.eta);
    for (int i = 0; i < species; ++i) r.c.species(i)[j] = z.c[i];
    r.u[j] = z.u;
    entropy += mesh.weight(j) * model_.entropy(z);
  }
  r.entropy = entropy;
  r.diagnostics = verify(r);
  return r;
}

EquilibriumDiagnostics DualProblem::verify(const EquilibriumResult& r) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();
  const std::vector<double>& q = model_.charges();

  EquilibriumDiagnostics diag;
  diag.charge_residual = std::abs(total_charge(r.c) - Q0_);
  if (op_.classification() == BoundaryCase::PureNeumann) {
    // Away from the constraint manifold the charge density may carry a small
    // incompatible mean; evaluate the field energy on its compatible part.
    Field rho = r.c.charge_density();
    const double shift = integrate(rho) / mesh.domain_measure();
    for (int j = 0; j < rho.size(); ++j) rho[j] -= shift;
    const Field psi_rho = solve_internal_potential(op_, rho);
    Field total = psi_rho;
    total += psi_ext_;
    diag.energy_residual =
        std::abs(0.5 * op_.quadratic(total) + integrate(r.u) - E0_);
  } else {
    diag.energy_residual =
        std::abs(total_energy(op_, r.c, r.u, psi_ext_) - E0_);
  }

  double theta_min = 0.0, theta_max = 0.0, theta_sum = 0.0;
  double zeta_defect = 0.0;
  PrimalPoint z;
  z.c.resize(species);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < species; ++i) z.c[i] = r.c.species(i)[j];
    z.u = r.u[j];
    const DualVariables dv = model_.entropy_gradient(z);
    const double theta = -1.0 / dv.v;
    if (j == 0) {
      theta_min = theta_max = theta;
    } else {
      theta_min = std::min(theta_min, theta);
      theta_max = std::max(theta_max, theta);
    }
    theta_sum += theta;
    // zeta_i = theta D_{c_i}S - q_i Psi, with D_c S = -y.
    const double zeta1 = theta * (-dv.y[0]) - q[0] * r.Psi[j];
    for (int i = 0; i < species; ++i) {
      const double zeta_i = theta * (-dv.y[i]) - q[i] * r.Psi[j];
      zeta_defect = std::max(zeta_defect, std::abs(zeta_i * q[0] - zeta1 * q[i]));
    }
  }
  const double theta_mean = theta_sum / n;
  diag.theta_spread_rel = (theta_max - theta_min) / std::abs(theta_mean);
  diag.zeta_defect = zeta_defect;

  // Poisson residual of the total potential: L(Psi - psi_ext) should match
  // the lumped charge load on free dofs.
  Field psi_c = r.Psi;
  psi_c -= psi_ext_;
  const std::vector<double> lhs = op_.apply(psi_c);
  const std::vector<double> rhs = op_.density_load(r.c.charge_density());
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    if (op_.is_dirichlet_node(j)) continue;
    const double rj = lhs[j] - rhs[j];
    num += rj * rj;
    den += rhs[j] * rhs[j];
  }
  if (op_.classification() == BoundaryCase::PureNeumann) {
    // Defined modulo constants; compare after removing the common mean.
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += lhs[j] - rhs[j];
    num = 0.0;
    for (int j = 0; j < n; ++j) {
      const double rj = lhs[j] - rhs[j] - sum * mesh.weight(j) / mesh.domain_measure();
      num += rj * rj;
    }
  }
  diag.poisson_residual_rel = std::sqrt(num) / (1.0 + std::sqrt(den));
  return diag;
}

}  // namespace eerds
