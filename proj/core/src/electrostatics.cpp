#include "eerds/electrostatics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eerds {

namespace {

double robin_sum(const Mesh& m, const Field& f) {
  double s = 0.0;
  if (m.left().kind == BcKind::Robin) s += m.left().omega * f[0];
  if (m.right().kind == BcKind::Robin) s += m.right().omega * f[f.size() - 1];
  return s;
}

}  // namespace

AssembledOperator assemble(const PoissonProblem& problem) {
  const Mesh& m = *problem.mesh;
  const int n = m.node_count();
  if (problem.epsilon.mesh().get() != &m || problem.doping.mesh().get() != &m) {
    throw std::invalid_argument("assemble: fields on a different mesh");
  }
  double eps_min = problem.epsilon[0];
  for (int j = 0; j < n; ++j) eps_min = std::min(eps_min, problem.epsilon[j]);
  if (!(eps_min > 0.0)) {
    throw std::invalid_argument("assemble: permittivity must be uniformly positive");
  }

  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  for (int e = 0; e < n - 1; ++e) {
    const double h = m.element_size(e);
    const double eps_e = 0.5 * (problem.epsilon[e] + problem.epsilon[e + 1]);
    diag[e] += eps_e / h;
    diag[e + 1] += eps_e / h;
    off[e] -= eps_e / h;
  }
  if (m.left().kind == BcKind::Robin) diag[0] += m.left().omega;
  if (m.right().kind == BcKind::Robin) diag[n - 1] += m.right().omega;

  AssembledOperator op;
  op.mesh_ = problem.mesh;
  op.full_ = SymTridiagonal(diag, off);
  op.dirichlet_.assign(n, 0);
  if (m.left().kind == BcKind::Dirichlet) op.dirichlet_[0] = 1;
  if (m.right().kind == BcKind::Dirichlet) op.dirichlet_[n - 1] = 1;

  op.free_lo_ = 0;
  op.free_hi_ = n - 1;
  op.pinned_ = false;
  switch (m.classification()) {
    case BoundaryCase::SomeDirichlet:
      if (op.dirichlet_[0]) op.free_lo_ = 1;
      if (op.dirichlet_[n - 1]) op.free_hi_ = n - 2;
      break;
    case BoundaryCase::PureNeumann:
      op.free_lo_ = 1;  // pin the first node, shift to zero mean afterwards
      op.pinned_ = true;
      break;
    case BoundaryCase::PureRobin:
      break;
  }

  const int fn = op.free_hi_ - op.free_lo_ + 1;
  std::vector<double> fd(diag.begin() + op.free_lo_,
                         diag.begin() + op.free_lo_ + fn);
  std::vector<double> fo(fn - 1);
  for (int i = 0; i + 1 < fn; ++i) fo[i] = off[op.free_lo_ + i];
  op.factored_ = SymTridiagonal(std::move(fd), std::move(fo));
  if (!op.factored_.factor()) {
    throw std::runtime_error("assemble: constrained operator not positive definite");
  }
  return op;
}

double AssembledOperator::bilinear(const Field& f, const Field& g) const {
  require_same_mesh(f, g);
  const Mesh& m = *mesh_;
  const std::vector<double> lf = full_.multiply(f.values());
  double s = 0.0;
  for (int j = 0; j < m.node_count(); ++j) s += lf[j] * g[j];
  return s;
}

std::vector<double> AssembledOperator::apply(const Field& f) const {
  return full_.multiply(f.values());
}

std::vector<double> AssembledOperator::density_load(const Field& rho) const {
  const Mesh& m = *mesh_;
  std::vector<double> load(m.node_count());
  for (int j = 0; j < m.node_count(); ++j) load[j] = m.weight(j) * rho[j];
  return load;
}

std::vector<double> AssembledOperator::external_load(const Field& doping,
                                                     double g_left,
                                                     double g_right) const {
  std::vector<double> load = density_load(doping);
  const Mesh& m = *mesh_;
  // Surface charges act on the whole non-Dirichlet boundary; a Neumann
  // endpoint is the zero-weight Robin case and still carries its flux datum.
  if (m.left().kind != BcKind::Dirichlet) load[0] += g_left;
  if (m.right().kind != BcKind::Dirichlet) load[m.node_count() - 1] += g_right;
  return load;
}

Field AssembledOperator::solve_load(const std::vector<double>& load) const {
  const Mesh& m = *mesh_;
  const int n = m.node_count();
  if (static_cast<int>(load.size()) != n) {
    throw std::invalid_argument("solve_load: load size mismatch");
  }

  if (pinned_) {
    double sum = 0.0, abs_sum = 0.0;
    for (double v : load) {
      sum += v;
      abs_sum += std::abs(v);
    }
    if (std::abs(sum) > 1e-10 * std::max(abs_sum, 1e-300)) {
      std::ostringstream msg;
      msg << "solve_load: pure Neumann load incompatible, total charge " << sum;
      throw std::invalid_argument(msg.str());
    }
  }

  const int fn = free_hi_ - free_lo_ + 1;
  std::vector<double> rhs(fn);
  for (int i = 0; i < fn; ++i) rhs[i] = load[free_lo_ + i];
  std::vector<double> x = factored_.solve(rhs);

  Field psi(mesh_, 0.0);
  for (int i = 0; i < fn; ++i) psi[free_lo_ + i] = x[i];

  if (pinned_) {
    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += m.weight(j) * psi[j];
    mean /= m.domain_measure();
    for (int j = 0; j < n; ++j) psi[j] -= mean;
  }
  return psi;
}

double AssembledOperator::dual_norm_of_load(const std::vector<double>& load) const {
  const Field psi = solve_load(load);
  double s = 0.0;
  for (int j = 0; j < psi.size(); ++j) s += load[j] * psi[j];
  return std::sqrt(std::max(s, 0.0));
}

Field solve_internal_potential(const AssembledOperator& op, const Field& rho) {
  return op.solve_load(op.density_load(rho));
}

Field solve_external_potential(const AssembledOperator& op, const Field& doping,
                               double g_left, double g_right) {
  return op.solve_load(op.external_load(doping, g_left, g_right));
}

double electrostatic_energy(const AssembledOperator& op, const Field& rho,
                            const Field& psi_ext) {
  const Field psi_rho = solve_internal_potential(op, rho);
  Field total = psi_rho;
  total += psi_ext;
  const double compact = 0.5 * op.quadratic(total);

  double pairing = 0.0;
  const Mesh& m = *op.mesh();
  for (int j = 0; j < rho.size(); ++j) pairing += m.weight(j) * rho[j] * psi_ext[j];
  const double expanded =
      0.5 * op.quadratic(psi_rho) + pairing + 0.5 * op.quadratic(psi_ext);
  if (std::abs(compact - expanded) > 1e-10 * (1.0 + std::abs(compact))) {
    throw std::logic_error("electrostatic_energy: expansion identity violated");
  }
  return compact;
}

MinimalEnergy min_electro_energy(const AssembledOperator& op, double Q0,
                                 const Field& psi_ext) {
  const Mesh& m = *op.mesh();
  MinimalEnergy r;
  switch (m.classification()) {
    case BoundaryCase::SomeDirichlet:
      r.value = 0.0;
      break;
    case BoundaryCase::PureNeumann:
      if (Q0 != 0.0) {
        std::ostringstream msg;
        msg << "min_electro_energy: pure Neumann requires Q0 = 0, got " << Q0;
        throw std::invalid_argument(msg.str());
      }
      r.value = 0.0;
      break;
    case BoundaryCase::PureRobin: {
      const double omega_sum = m.robin_weight_sum();
      const double kappa = (Q0 + robin_sum(m, psi_ext)) / omega_sum;
      r.kappa_star = kappa;
      r.value = 0.5 * kappa * kappa * omega_sum;
      break;
    }
  }
  return r;
}

double total_energy(const AssembledOperator& op, const SpeciesField& c,
                    const Field& u, const Field& psi_ext) {
  const Field rho = c.charge_density();
  const Field psi_rho = solve_internal_potential(op, rho);
  Field total = psi_rho;
  total += psi_ext;
  return 0.5 * op.quadratic(total) + integrate(u);
}

double total_charge(const SpeciesField& c) {
  double s = 0.0;
  for (int i = 0; i < c.species_count(); ++i) {
    s += c.charges()[i] * integrate(c.species(i));
  }
  return s;
}

Field dirichlet_charge_concentration(const MeshHandle& mesh, int n) {
  const Mesh& m = *mesh;
  const bool left_d = m.left().kind == BcKind::Dirichlet;
  const bool right_d = m.right().kind == BcKind::Dirichlet;
  if (!left_d && !right_d) {
    throw std::invalid_argument(
        "dirichlet_charge_concentration: mesh has no Dirichlet endpoint");
  }
  const double x_lo = m.node(0), x_hi = m.node(m.node_count() - 1);
  const double width = (x_hi - x_lo) / n;
  double a0, a1;
  if (left_d) {
    a0 = x_lo;
    a1 = x_lo + width;
  } else {
    a0 = x_hi - width;
    a1 = x_hi;
  }
  double h_max = 0.0;
  for (int e = 0; e < m.element_count(); ++e) {
    h_max = std::max(h_max, m.element_size(e));
  }
  if (width < 2.0 * h_max) {
    throw std::invalid_argument(
        "dirichlet_charge_concentration: strip narrower than two elements");
  }

  Field rho(mesh, 0.0);
  for (int j = 0; j < m.node_count(); ++j) {
    const double v_lo = j == 0 ? x_lo : 0.5 * (m.node(j - 1) + m.node(j));
    const double v_hi = j == m.node_count() - 1
                            ? x_hi
                            : 0.5 * (m.node(j) + m.node(j + 1));
    const double overlap =
        std::max(0.0, std::min(v_hi, a1) - std::max(v_lo, a0));
    rho[j] = overlap / (m.weight(j) * width);
  }
  return rho;
}

}  // namespace eerds
