#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace eerds {

enum class BcKind { Dirichlet, Neumann, Robin };

/// One endpoint of the interval. Neumann is Robin with weight zero; the
/// distinction is kept because the case classification below depends on
/// whether any Robin weight is actually positive.
struct BoundarySpec {
  BcKind kind = BcKind::Neumann;
  double omega = 0.0;

  static BoundarySpec dirichlet() { return {BcKind::Dirichlet, 0.0}; }
  static BoundarySpec neumann() { return {BcKind::Neumann, 0.0}; }
  static BoundarySpec robin(double omega) { return {BcKind::Robin, omega}; }
};

/// Classification of the boundary-value problem; decides the constraint on
/// the discrete potential space (Dirichlet zeros / zero mean / none).
enum class BoundaryCase { SomeDirichlet, PureNeumann, PureRobin };

std::string to_string(BoundaryCase c);

/// 1D interval partition carrying piecewise-linear basis bookkeeping:
/// element sizes, lumped node weights and the boundary classification.
/// Immutable after construction; shared by all fields living on it.
class Mesh {
 public:
  Mesh(std::vector<double> nodes, BoundarySpec left, BoundarySpec right);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int element_count() const { return node_count() - 1; }
  double node(int j) const { return nodes_[j]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double element_size(int e) const { return nodes_[e + 1] - nodes_[e]; }

  /// Lumped quadrature weight of node j (half the adjacent element sizes).
  double weight(int j) const { return weights_[j]; }
  const std::vector<double>& weights() const { return weights_; }
  double domain_measure() const { return measure_; }

  const BoundarySpec& left() const { return left_; }
  const BoundarySpec& right() const { return right_; }
  BoundaryCase classification() const { return case_; }
  /// Sum of Robin weights over the boundary (counting measure on endpoints).
  double robin_weight_sum() const { return robin_sum_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  BoundarySpec left_, right_;
  BoundaryCase case_;
  double measure_ = 0.0;
  double robin_sum_ = 0.0;
};

using MeshHandle = std::shared_ptr<const Mesh>;

MeshHandle build_uniform_mesh(double x_left, double x_right, int node_count,
                              BoundarySpec left, BoundarySpec right);

/// Nodal scalar field on a mesh (the P1 interpolant of its values).
class Field {
 public:
  Field() = default;
  explicit Field(MeshHandle mesh, double fill = 0.0);
  Field(MeshHandle mesh, std::vector<double> values);

  const MeshHandle& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int j) const { return values_[j]; }
  double& operator[](int j) { return values_[j]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  Field& add_scaled(const Field& other, double s);
  Field& fill(double v);

 private:
  MeshHandle mesh_;
  std::vector<double> values_;
};

/// Stack of per-species concentration fields with their charge numbers.
class SpeciesField {
 public:
  SpeciesField() = default;
  SpeciesField(MeshHandle mesh, int species_count, std::vector<double> charges);

  int species_count() const { return static_cast<int>(fields_.size()); }
  const MeshHandle& mesh() const { return mesh_; }
  const std::vector<double>& charges() const { return charges_; }
  Field& species(int i) { return fields_[i]; }
  const Field& species(int i) const { return fields_[i]; }

  /// Nodal charge density q.c.
  Field charge_density() const;

 private:
  MeshHandle mesh_;
  std::vector<Field> fields_;
  std::vector<double> charges_;
};

void require_same_mesh(const Field& a, const Field& b);

/// Integral of the P1 interpolant (trapezoid; exact for piecewise-linear).
double integrate(const Field& f);
/// Integral of the product of two P1 interpolants (per-element Simpson;
/// exact because the product is piecewise quadratic).
double integrate(const Field& f, const Field& g);

double l2_norm(const Field& f);
double h1_seminorm(const Field& f);
double linf_norm(const Field& f);
double l1_norm(const Field& f);

/// Writes "x,<name>" rows; one column per field.
void write_csv(std::ostream& os, const std::vector<std::string>& names,
               const std::vector<const Field*>& fields);

}  // namespace eerds
