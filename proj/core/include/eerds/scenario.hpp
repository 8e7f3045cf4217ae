#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eerds/evolution.hpp"
#include "eerds/mesh.hpp"

namespace eerds {

/// Parse failure with the offending line and field.
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(int line, const std::string& field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Spatial profile: constant, affine in x, or tabulated piecewise-linear.
struct Profile {
  enum class Kind { Constant, Linear, Tabulated } kind = Kind::Constant;
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<std::pair<double, double>> table;

  double operator()(double x) const;
  Field sample(const MeshHandle& mesh) const;

  static Profile constant(double v);
  static Profile linear(double a, double b);
};

enum class EntropyFamily { Boltzmann, SizeExclusion };

struct StageToggles {
  bool electro = true;
  bool dual = true;
  bool direct = true;
  bool evolve = true;
};

/// Full description of one run: geometry, data, model, reactions,
/// constraints, solver controls and stage toggles.
struct Scenario {
  // [mesh]
  double x_left = 0.0;
  double x_right = 1.0;
  int nodes = 101;
  Profile epsilon = Profile::constant(1.0);
  Profile doping = Profile::constant(0.0);

  // [boundary]
  BoundarySpec left = BoundarySpec::robin(1.0);
  BoundarySpec right = BoundarySpec::robin(1.0);
  double g_left = 0.0;
  double g_right = 0.0;

  // [entropy]
  EntropyFamily family = EntropyFamily::Boltzmann;
  int species = 1;
  double alpha = 0.5;
  double beta0 = 1.0;
  double w0 = 1.0;
  std::vector<double> beta;
  std::vector<double> charges;

  // [reactions]
  std::vector<Reaction> reactions;
  bool single_conservation_law = false;

  // [constraints]
  double E0 = 1.0;
  double Q0 = 0.0;

  // [solver]
  double tol_grad = 1e-8;
  int max_iterations = 200;
  double direct_tol = 1e-8;
  int direct_max_iterations = 50000;
  unsigned seed = 0;

  // [evolution]
  double t_end = 40.0;
  double dt_initial = 1e-3;
  double dt_max = 0.05;
  double distance_tol = 1e-4;
  double entropy_slack = 1e-10;
  int snapshot_stride = 0;  // 0 keeps only the final state
  std::vector<double> mobility;
  double heat_conductivity = 1.0;

  // [stages]
  StageToggles stages;

  /// Cross-field consistency checks (species counts, pure Neumann charge).
  void validate() const;

  MeshHandle make_mesh() const;
  BoltzmannEntropyModel make_boltzmann_model() const;
  SizeExclusionEntropyModel make_size_exclusion_model() const;
  MobilityModel make_mobility() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace eerds
