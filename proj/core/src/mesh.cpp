#include "eerds/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace eerds {

std::string to_string(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::SomeDirichlet:
      return "some_dirichlet";
    case BoundaryCase::PureNeumann:
      return "pure_neumann";
    case BoundaryCase::PureRobin:
      return "pure_robin";
  }
  return "unknown";
}

Mesh::Mesh(std::vector<double> nodes, BoundarySpec left, BoundarySpec right)
    : nodes_(std::move(nodes)), left_(left), right_(right) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("Mesh: need at least 2 nodes");
  }
  for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
    if (!(nodes_[j] < nodes_[j + 1])) {
      throw std::invalid_argument("Mesh: nodes must be strictly increasing");
    }
  }
  for (const BoundarySpec* bc : {&left_, &right_}) {
    if (bc->kind == BcKind::Robin && bc->omega < 0.0) {
      throw std::invalid_argument("Mesh: Robin weight must be nonnegative");
    }
    if (bc->kind != BcKind::Robin && bc->omega != 0.0) {
      throw std::invalid_argument("Mesh: omega only meaningful for Robin");
    }
  }

  const int n = node_count();
  weights_.assign(n, 0.0);
  for (int e = 0; e < n - 1; ++e) {
    const double h = element_size(e);
    weights_[e] += 0.5 * h;
    weights_[e + 1] += 0.5 * h;
    measure_ += h;
  }

  const bool any_dirichlet =
      left_.kind == BcKind::Dirichlet || right_.kind == BcKind::Dirichlet;
  robin_sum_ = 0.0;
  if (left_.kind == BcKind::Robin) robin_sum_ += left_.omega;
  if (right_.kind == BcKind::Robin) robin_sum_ += right_.omega;

  if (any_dirichlet) {
    case_ = BoundaryCase::SomeDirichlet;
  } else if (robin_sum_ > 0.0) {
    case_ = BoundaryCase::PureRobin;
  } else {
    case_ = BoundaryCase::PureNeumann;
  }
}

MeshHandle build_uniform_mesh(double x_left, double x_right, int node_count,
                              BoundarySpec left, BoundarySpec right) {
  if (!(x_left < x_right)) {
    throw std::invalid_argument("build_uniform_mesh: requires x_left < x_right");
  }
  if (node_count < 2) {
    throw std::invalid_argument("build_uniform_mesh: need at least 2 nodes");
  }
  std::vector<double> nodes(node_count);
  const double h = (x_right - x_left) / (node_count - 1);
  for (int j = 0; j < node_count; ++j) nodes[j] = x_left + j * h;
  nodes.back() = x_right;
  return std::make_shared<Mesh>(std::move(nodes), left, right);
}

Field::Field(MeshHandle mesh, double fill)
    : mesh_(std::move(mesh)), values_(mesh_->node_count(), fill) {}

Field::Field(MeshHandle mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_->node_count()) {
    throw std::invalid_argument("Field: value count does not match mesh");
  }
}

Field& Field::operator+=(const Field& other) {
  require_same_mesh(*this, other);
  for (int j = 0; j < size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_mesh(*this, other);
  for (int j = 0; j < size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::add_scaled(const Field& other, double s) {
  require_same_mesh(*this, other);
  for (int j = 0; j < size(); ++j) values_[j] += s * other.values_[j];
  return *this;
}

Field& Field::fill(double v) {
  for (double& x : values_) x = v;
  return *this;
}

SpeciesField::SpeciesField(MeshHandle mesh, int species_count,
                           std::vector<double> charges)
    : mesh_(std::move(mesh)), charges_(std::move(charges)) {
  if (species_count < 1) {
    throw std::invalid_argument("SpeciesField: need at least one species");
  }
  if (static_cast<int>(charges_.size()) != species_count) {
    throw std::invalid_argument("SpeciesField: charge count mismatch");
  }
  fields_.reserve(species_count);
  for (int i = 0; i < species_count; ++i) fields_.emplace_back(mesh_);
}

Field SpeciesField::charge_density() const {
  Field rho(mesh_);
  for (int i = 0; i < species_count(); ++i) {
    rho.add_scaled(fields_[i], charges_[i]);
  }
  return rho;
}

void require_same_mesh(const Field& a, const Field& b) {
  if (a.mesh().get() != b.mesh().get()) {
    throw std::invalid_argument("fields live on different meshes");
  }
}

double integrate(const Field& f) {
  const Mesh& m = *f.mesh();
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += m.weight(j) * f[j];
  return s;
}

double integrate(const Field& f, const Field& g) {
  require_same_mesh(f, g);
  const Mesh& m = *f.mesh();
  double s = 0.0;
  for (int e = 0; e < m.element_count(); ++e) {
    const double h = m.element_size(e);
    const double fl = f[e], fr = f[e + 1], gl = g[e], gr = g[e + 1];
    const double fm = 0.5 * (fl + fr), gm = 0.5 * (gl + gr);
    s += h / 6.0 * (fl * gl + 4.0 * fm * gm + fr * gr);
  }
  return s;
}

double l2_norm(const Field& f) { return std::sqrt(integrate(f, f)); }

double h1_seminorm(const Field& f) {
  const Mesh& m = *f.mesh();
  double s = 0.0;
  for (int e = 0; e < m.element_count(); ++e) {
    const double h = m.element_size(e);
    const double d = (f[e + 1] - f[e]) / h;
    s += d * d * h;
  }
  return std::sqrt(s);
}

double linf_norm(const Field& f) {
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s = std::max(s, std::abs(f[j]));
  return s;
}

double l1_norm(const Field& f) {
  const Mesh& m = *f.mesh();
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += m.weight(j) * std::abs(f[j]);
  return s;
}

void write_csv(std::ostream& os, const std::vector<std::string>& names,
               const std::vector<const Field*>& fields) {
  if (fields.empty() || names.size() != fields.size()) {
    throw std::invalid_argument("write_csv: names and fields must match");
  }
  const Mesh& m = *fields[0]->mesh();
  os << "x";
  for (const auto& n : names) os << "," << n;
  os << "\n";
  os << std::setprecision(17);
  for (int j = 0; j < m.node_count(); ++j) {
    os << m.node(j);
    for (const Field* f : fields) os << "," << (*f)[j];
    os << "\n";
  }
}

}  // namespace eerds
