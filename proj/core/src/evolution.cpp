#include "eerds/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eerds {

namespace {

int matrix_rank(std::vector<std::vector<double>> m) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    double best = 1e-12;
    for (int r = rank; r < rows; ++r) {
      if (std::abs(m[r][col]) > best) {
        best = std::abs(m[r][col]);
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][col] == 0.0) continue;
      const double f = m[r][col] / m[rank][col];
      for (int c2 = col; c2 < cols; ++c2) m[r][c2] -= f * m[rank][c2];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<Reaction> reactions,
                                 std::vector<double> charges,
                                 bool require_single_conservation_law)
    : reactions_(std::move(reactions)), charges_(std::move(charges)) {
  const int species = static_cast<int>(charges_.size());
  for (const Reaction& r : reactions_) {
    if (static_cast<int>(r.alpha.size()) != species ||
        static_cast<int>(r.beta.size()) != species) {
      throw std::invalid_argument("ReactionNetwork: stoichiometry size mismatch");
    }
    if (!(r.rate > 0.0)) {
      throw std::invalid_argument("ReactionNetwork: reaction rates must be positive");
    }
    double gq = 0.0;
    for (int i = 0; i < species; ++i) {
      if (r.alpha[i] < 0 || r.beta[i] < 0) {
        throw std::invalid_argument("ReactionNetwork: negative stoichiometry");
      }
      gq += (r.beta[i] - r.alpha[i]) * charges_[i];
    }
    if (std::abs(gq) > 1e-12) {
      std::ostringstream msg;
      msg << "ReactionNetwork: reaction does not conserve charge (gamma.q = "
          << gq << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  if (require_single_conservation_law) {
    std::vector<std::vector<double>> g(reactions_.size(),
                                       std::vector<double>(species, 0.0));
    for (int r = 0; r < size(); ++r) {
      for (int i = 0; i < species; ++i) g[r][i] = gamma(r, i);
    }
    if (matrix_rank(std::move(g)) != species - 1) {
      throw std::invalid_argument(
          "ReactionNetwork: charge is not the only conservation law");
    }
  }
}

EvolutionProblem::EvolutionProblem(const BoltzmannEntropyModel& model,
                                   const AssembledOperator& op,
                                   ReactionNetwork network,
                                   MobilityModel mobility, Field psi_ext)
    : model_(model),
      op_(op),
      network_(std::move(network)),
      mobility_(std::move(mobility)),
      psi_ext_(std::move(psi_ext)) {
  if (network_.species_count() != model_.species_count()) {
    throw std::invalid_argument("EvolutionProblem: network species mismatch");
  }
  if (static_cast<int>(mobility_.species_mobility.size()) !=
      model_.species_count()) {
    throw std::invalid_argument("EvolutionProblem: mobility size mismatch");
  }
  for (double d : mobility_.species_mobility) {
    if (!(d > 0.0)) {
      throw std::invalid_argument("EvolutionProblem: mobilities must be positive");
    }
  }
  if (!(mobility_.heat_conductivity > 0.0)) {
    throw std::invalid_argument("EvolutionProblem: heat conductivity must be positive");
  }

  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  for (int e = 0; e < n - 1; ++e) {
    const double h = mesh.element_size(e);
    diag[e] += 1.0 / h;
    diag[e + 1] += 1.0 / h;
    off[e] -= 1.0 / h;
  }
  species_stiffness_ = SymTridiagonal(std::move(diag), std::move(off));
}

SpeciesField EvolutionProblem::reactive_rate(const SpeciesField& c,
                                             const Field& u) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();
  SpeciesField rate(op_.mesh(), species, model_.charges());
  std::vector<double> ratio(species);
  for (int j = 0; j < n; ++j) {
    if (!(u[j] > 0.0)) {
      throw std::domain_error("reactive_rate: requires u > 0");
    }
    for (int i = 0; i < species; ++i) {
      const double ci = c.species(i)[j];
      if (ci < 0.0) throw std::domain_error("reactive_rate: requires c >= 0");
      ratio[i] = ci / model_.equilibrium_concentration(i, u[j]);
    }
    for (int r = 0; r < network_.size(); ++r) {
      const Reaction& rx = network_.reaction(r);
      double forward = rx.rate, backward = rx.rate;
      for (int i = 0; i < species; ++i) {
        for (int k = 0; k < rx.alpha[i]; ++k) forward *= ratio[i];
        for (int k = 0; k < rx.beta[i]; ++k) backward *= ratio[i];
      }
      const double flux = forward - backward;
      for (int i = 0; i < species; ++i) {
        rate.species(i)[j] += flux * network_.gamma(r, i);
      }
    }
  }
  return rate;
}

Field EvolutionProblem::total_potential(const PrimalState& z) const {
  Field psi = solve_internal_potential(op_, z.c.charge_density());
  psi += psi_ext_;
  return psi;
}

std::pair<SpeciesField, Field> EvolutionProblem::diffusive_rate(
    const SpeciesField& c, const Field& u, const Field& Psi) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();
  const std::vector<double>& q = model_.charges();

  // Nodal entropy-gradient components W = (D_c S, D_u S).
  std::vector<std::vector<double>> wy(species, std::vector<double>(n));
  std::vector<double> wv(n);
  for (int j = 0; j < n; ++j) {
    if (!(u[j] > 0.0)) throw std::domain_error("diffusive_rate: requires u > 0");
    const double wu = model_.w(u[j]);
    double big_b = model_.beta0();
    for (int i = 0; i < species; ++i) {
      const double ci = c.species(i)[j];
      if (!(ci > 0.0)) throw std::domain_error("diffusive_rate: requires c > 0");
      wy[i][j] = -std::log(ci / (model_.beta()[i] * (wu + model_.w0())));
      big_b += ci / (wu + model_.w0());
    }
    wv[j] = model_.w_prime(u[j]) * big_b;
  }

  SpeciesField c_rate(op_.mesh(), species, q);
  Field u_rate(op_.mesh(), 0.0);
  std::vector<double> fu(n, 0.0);
  std::vector<std::vector<double>> fc(species, std::vector<double>(n, 0.0));

  for (int e = 0; e < n - 1; ++e) {
    const double h = mesh.element_size(e);
    const double grad_psi = (Psi[e + 1] - Psi[e]) / h;
    const double wv_mid = 0.5 * (wv[e] + wv[e + 1]);
    double coupling = 0.0;
    for (int i = 0; i < species; ++i) {
      const double d_mid = mobility_.species_mobility[i] * 0.5 *
                           (c.species(i)[e] + c.species(i)[e + 1]);
      const double grad_wy = (wy[i][e + 1] - wy[i][e]) / h;
      const double flux = d_mid * (grad_wy - wv_mid * q[i] * grad_psi);
      fc[i][e] -= flux;
      fc[i][e + 1] += flux;
      coupling += q[i] * flux * grad_psi;
    }
    const double kappa_mid =
        mobility_.heat_conductivity * 0.5 * (u[e] + u[e + 1]);
    const double heat_flux = kappa_mid * (wv[e + 1] - wv[e]) / h;
    fu[e] -= heat_flux;
    fu[e + 1] += heat_flux;
    fu[e] -= coupling * 0.5 * h;
    fu[e + 1] -= coupling * 0.5 * h;
  }

  for (int j = 0; j < n; ++j) {
    const double m = mesh.weight(j);
    for (int i = 0; i < species; ++i) c_rate.species(i)[j] = fc[i][j] / m;
    u_rate[j] = fu[j] / m;
  }
  return {std::move(c_rate), std::move(u_rate)};
}

double EvolutionProblem::entropy_production(const PrimalState& z) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();
  const Field psi = total_potential(z);
  const auto [c_diff, u_diff] = diffusive_rate(z.c, z.u, psi);
  const SpeciesField c_reac = reactive_rate(z.c, z.u);

  double production = 0.0;
  PrimalPoint zp;
  zp.c.resize(species);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < species; ++i) zp.c[i] = z.c.species(i)[j];
    zp.u = z.u[j];
    const DualVariables d = model_.entropy_gradient(zp);
    double s = 0.0;
    for (int i = 0; i < species; ++i) {
      s += (-d.y[i]) * (c_diff.species(i)[j] + c_reac.species(i)[j]);
    }
    s += (-d.v) * u_diff[j];
    production += mesh.weight(j) * s;
  }
  return production;
}

PrimalState EvolutionProblem::advance(const PrimalState& z, double dt,
                                      TimeScheme scheme) const {
  const Mesh& mesh = *op_.mesh();
  const int n = mesh.node_count();
  const int species = model_.species_count();
  const std::vector<double>& q = model_.charges();

  const Field psi_old = total_potential(z);

  if (scheme == TimeScheme::Explicit) {
    const auto [c_diff, u_diff] = diffusive_rate(z.c, z.u, psi_old);
    const SpeciesField c_reac = reactive_rate(z.c, z.u);
    PrimalState out = z;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < species; ++i) {
        out.c.species(i)[j] +=
            dt * (c_diff.species(i)[j] + c_reac.species(i)[j]);
      }
      out.u[j] += dt * u_diff[j];
    }
    return out;
  }

  // Nodal W components at the old state.
  std::vector<std::vector<double>> wy(species, std::vector<double>(n));
  std::vector<double> wv(n), dwv_du(n);
  for (int j = 0; j < n; ++j) {
    const double wu = model_.w(z.u[j]);
    const double wp = model_.w_prime(z.u[j]);
    const double wpp =
        (model_.alpha() - 1.0) * std::pow(z.u[j], model_.alpha() - 2.0);
    double big_b = model_.beta0();
    double csum = 0.0;
    for (int i = 0; i < species; ++i) {
      const double ci = z.c.species(i)[j];
      wy[i][j] = -std::log(ci / (model_.beta()[i] * (wu + model_.w0())));
      big_b += ci / (wu + model_.w0());
      csum += ci;
    }
    wv[j] = wp * big_b;
    dwv_du[j] = wpp * big_b - wp * wp * csum / ((wu + model_.w0()) * (wu + model_.w0()));
  }

  // Species updates: implicit in the linear stiffness, explicit drift.
  PrimalState out = z;
  std::vector<double> flux_explicit(n - 1);
  std::vector<std::vector<double>> g_eff(species, std::vector<double>(n - 1));
  for (int i = 0; i < species; ++i) {
    const double dbar = mobility_.species_mobility[i];
    std::vector<double> rhs(n);
    for (int e = 0; e < n - 1; ++e) {
      const double h = mesh.element_size(e);
      const double c_mid = 0.5 * (z.c.species(i)[e] + z.c.species(i)[e + 1]);
      const double grad_c = (z.c.species(i)[e + 1] - z.c.species(i)[e]) / h;
      const double grad_wy = (wy[i][e + 1] - wy[i][e]) / h;
      const double wv_mid = 0.5 * (wv[e] + wv[e + 1]);
      const double grad_psi = (psi_old[e + 1] - psi_old[e]) / h;
      // Total flux minus its implicit linear-diffusion part.
      flux_explicit[e] = dbar * c_mid * (grad_wy - wv_mid * q[i] * grad_psi) +
                         dbar * grad_c;
    }
    for (int j = 0; j < n; ++j) {
      rhs[j] = mesh.weight(j) * z.c.species(i)[j] / dt;
      if (j > 0) rhs[j] += flux_explicit[j - 1];
      if (j < n - 1) rhs[j] -= flux_explicit[j];
    }
    SymTridiagonal sys = species_stiffness_;
    for (int j = 0; j < n; ++j) {
      sys.diag()[j] = dbar * sys.diag()[j] + mesh.weight(j) / dt;
    }
    for (int e = 0; e < n - 1; ++e) sys.off()[e] *= dbar;
    if (!sys.factor()) {
      throw std::runtime_error("evolution step: species system not SPD");
    }
    const std::vector<double> c_new = sys.solve(rhs);
    for (int j = 0; j < n; ++j) out.c.species(i)[j] = c_new[j];
    for (int e = 0; e < n - 1; ++e) {
      const double h = mesh.element_size(e);
      const double grad_c_new = (c_new[e + 1] - c_new[e]) / h;
      g_eff[i][e] = -dbar * grad_c_new + flux_explicit[e];
    }
  }

  // Midpoint potential keeps the discrete energy exchange exact.
  const Field psi_new = total_potential(out);
  Field psi_mid = psi_old;
  psi_mid += psi_new;
  psi_mid *= 0.5;

  // Internal energy: implicit in the linearized heat diffusion.
  std::vector<double> rhs_u(n);
  std::vector<double> diag_u(n), off_u(n - 1);
  for (int j = 0; j < n; ++j) {
    rhs_u[j] = mesh.weight(j) * z.u[j] / dt;
    diag_u[j] = mesh.weight(j) / dt;
  }
  for (int e = 0; e < n - 1; ++e) {
    const double h = mesh.element_size(e);
    const double u_mid = 0.5 * (z.u[e] + z.u[e + 1]);
    const double kappa_mid = mobility_.heat_conductivity * u_mid;
    const double d_coef =
        std::max(-kappa_mid * 0.5 * (dwv_du[e] + dwv_du[e + 1]), 0.0);
    diag_u[e] += d_coef / h;
    diag_u[e + 1] += d_coef / h;
    off_u[e] = -d_coef / h;
    // Explicit remainder of the heat flux plus the implicit recentering.
    const double grad_wv = (wv[e + 1] - wv[e]) / h;
    const double grad_u_old = (z.u[e + 1] - z.u[e]) / h;
    const double explicit_flux = kappa_mid * grad_wv + d_coef * grad_u_old;
    rhs_u[e] -= explicit_flux;
    rhs_u[e + 1] += explicit_flux;
    // Joule-type exchange with the field, paired with the midpoint potential.
    const double grad_psi_mid = (psi_mid[e + 1] - psi_mid[e]) / h;
    double coupling = 0.0;
    for (int i = 0; i < species; ++i) {
      coupling += q[i] * g_eff[i][e] * grad_psi_mid;
    }
    rhs_u[e] -= coupling * 0.5 * h;
    rhs_u[e + 1] -= coupling * 0.5 * h;
  }
  SymTridiagonal sys_u(std::move(diag_u), std::move(off_u));
  if (!sys_u.factor()) {
    throw std::runtime_error("evolution step: energy system not SPD");
  }
  const std::vector<double> u_new = sys_u.solve(rhs_u);
  for (int j = 0; j < n; ++j) out.u[j] = u_new[j];

  // Explicit charge-conserving reactions on the diffused state.
  bool positive = true;
  for (int j = 0; j < n && positive; ++j) {
    if (!(out.u[j] > 0.0)) positive = false;
    for (int i = 0; i < species; ++i) {
      if (out.c.species(i)[j] < 0.0) positive = false;
    }
  }
  if (positive && network_.size() > 0) {
    const SpeciesField c_reac = reactive_rate(out.c, out.u);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < species; ++i) {
        out.c.species(i)[j] += dt * c_reac.species(i)[j];
      }
    }
  }
  return out;
}

StepResult EvolutionProblem::step(const PrimalState& z, double dt,
                                  TimeScheme scheme, double entropy_slack,
                                  double dt_min) const {
  if (dt < 0.0) throw std::invalid_argument("step: dt must be nonnegative");
  const int n = op_.mesh()->node_count();
  const int species = model_.species_count();

  auto state_entropy = [&](const PrimalState& s) {
    const Mesh& mesh = *op_.mesh();
    PrimalPoint zp;
    zp.c.resize(species);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < species; ++i) zp.c[i] = s.c.species(i)[j];
      zp.u = s.u[j];
      total += mesh.weight(j) * model_.entropy(zp);
    }
    return total;
  };

  const double s_old = state_entropy(z);
  if (dt == 0.0) {
    StepResult r;
    r.state = z;
    r.entropy = s_old;
    r.energy = total_energy(op_, z.c, z.u, psi_ext_);
    r.charge = total_charge(z.c);
    return r;
  }

  // Entry values of the conserved functionals; the scheme is conservative up
  // to linear-solver roundoff, and the leftover is pushed back exactly so
  // long trajectories cannot accumulate drift.
  const double q_entry = total_charge(z.c);
  const double e_entry = total_energy(op_, z.c, z.u, psi_ext_);
  int pos_species = -1, neg_species = -1;
  for (int i = 0; i < species; ++i) {
    const double qi = model_.charges()[i];
    if (qi > 0.0 && (pos_species < 0 || qi > model_.charges()[pos_species])) {
      pos_species = i;
    }
    if (qi < 0.0 && (neg_species < 0 || qi < model_.charges()[neg_species])) {
      neg_species = i;
    }
  }
  const double measure = op_.mesh()->domain_measure();

  double trial_dt = dt;
  int halvings = 0;
  while (true) {
    PrimalState out = advance(z, trial_dt, scheme);
    if (pos_species >= 0 && neg_species >= 0) {
      const double defect = q_entry - total_charge(out.c);
      const int target = defect > 0.0 ? pos_species : neg_species;
      const double add = defect / (model_.charges()[target] * measure);
      for (int j = 0; j < n; ++j) out.c.species(target)[j] += add;
    }
    {
      const double gap = e_entry - total_energy(op_, out.c, out.u, psi_ext_);
      for (int j = 0; j < n; ++j) out.u[j] += gap / measure;
    }
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      if (!(out.u[j] > 0.0)) ok = false;
      for (int i = 0; i < species; ++i) {
        if (!(out.c.species(i)[j] > 0.0)) ok = false;
      }
    }
    double s_new = 0.0;
    if (ok) {
      s_new = state_entropy(out);
      if (!(s_new >= s_old - entropy_slack * (1.0 + std::abs(s_old)))) ok = false;
    }
    if (ok) {
      StepResult r;
      r.state = std::move(out);
      r.dt_used = trial_dt;
      r.entropy = s_new;
      r.energy = total_energy(op_, r.state.c, r.state.u, psi_ext_);
      r.charge = total_charge(r.state.c);
      r.halvings = halvings;
      return r;
    }
    trial_dt *= 0.5;
    ++halvings;
    if (trial_dt < dt_min) {
      throw std::runtime_error("step: dt underflow while enforcing positivity/entropy");
    }
  }
}

Trajectory EvolutionProblem::evolve(const PrimalState& initial,
                                    const EvolveOptions& opts,
                                    const EquilibriumResult* reference) const {
  Trajectory traj;
  PrimalState state = initial;
  double t = 0.0;
  double dt = opts.dt_initial;

  StepResult probe = step(state, 0.0, opts.scheme);
  const double e0 = probe.energy;
  const double q0 = probe.charge;
  double prev_entropy = probe.entropy;
  traj.min_entropy_increment = 0.0;

  auto record = [&](double time, double s, double e, double qq) {
    traj.time.push_back(time);
    traj.entropy.push_back(s);
    traj.energy.push_back(e);
    traj.charge.push_back(qq);
    if (reference != nullptr) {
      traj.distance.push_back(state_distance(model_, state, *reference));
    }
    traj.max_energy_drift_rel = std::max(
        traj.max_energy_drift_rel, std::abs(e - e0) / (1.0 + std::abs(e0)));
    traj.max_charge_drift = std::max(traj.max_charge_drift, std::abs(qq - q0));
  };
  record(0.0, probe.entropy, probe.energy, probe.charge);
  if (opts.snapshot_stride > 0) traj.snapshots.emplace_back(0.0, state);

  for (int k = 0; k < opts.max_steps && t < opts.t_end; ++k) {
    const double dt_try = std::min(dt, opts.t_end - t);
    StepResult r = step(state, dt_try, opts.scheme, opts.entropy_slack, opts.dt_min);
    state = std::move(r.state);
    t += r.dt_used;
    traj.steps = k + 1;
    traj.min_entropy_increment =
        std::min(traj.min_entropy_increment, r.entropy - prev_entropy);
    prev_entropy = r.entropy;
    record(t, r.entropy, r.energy, r.charge);
    if (opts.snapshot_stride > 0 && (k + 1) % opts.snapshot_stride == 0) {
      traj.snapshots.emplace_back(t, state);
    }
    dt = r.halvings > 0 ? r.dt_used : std::min(dt * 1.3, opts.dt_max);
    if (reference != nullptr && opts.distance_tol > 0.0 &&
        traj.distance.back() <= opts.distance_tol) {
      traj.reached_distance_tol = true;
      break;
    }
  }
  traj.snapshots.emplace_back(t, state);
  return traj;
}

double state_distance(const BoltzmannEntropyModel& model, const PrimalState& z,
                      const EquilibriumResult& ref) {
  double gap = 0.0, scale = 0.0;
  for (int i = 0; i < z.c.species_count(); ++i) {
    Field d = z.c.species(i);
    d -= ref.c.species(i);
    gap += l1_norm(d);
    scale += l1_norm(ref.c.species(i));
  }
  Field du = z.u;
  du -= ref.u;
  gap += l1_norm(du);
  scale += l1_norm(ref.u);

  // Temperature spread of the current state.
  const int n = z.u.size();
  PrimalPoint zp;
  zp.c.resize(z.c.species_count());
  double tmin = 0.0, tmax = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < z.c.species_count(); ++i) zp.c[i] = z.c.species(i)[j];
    zp.u = z.u[j];
    const double theta = model.temperature(zp);
    if (j == 0) {
      tmin = tmax = theta;
    } else {
      tmin = std::min(tmin, theta);
      tmax = std::max(tmax, theta);
    }
  }
  return gap / (1.0 + scale) + (tmax - tmin) / std::abs(0.5 * (tmax + tmin));
}

}  // namespace eerds
