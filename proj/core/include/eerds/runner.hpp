#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eerds/scenario.hpp"

namespace eerds {

struct RunOverrides {
  std::optional<StageToggles> stages;
  std::optional<double> tol_grad;
  std::optional<unsigned> seed;
  bool emit_dat = false;
};

struct RunOutcome {
  bool pass = false;
  bool infeasible = false;
  double minimal_energy = 0.0;
  std::vector<std::string> failures;
  std::string summary_path;
  std::string summary_json;
};

/// Executes the enabled pipeline stages and writes summary.json, field CSVs
/// and convergence traces into output_dir.
RunOutcome run_scenario(const Scenario& scenario, const std::string& output_dir,
                        const RunOverrides& overrides = {});

struct SelfCheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast invariant suite (conjugate round trips, manufactured solution,
/// closed-form bounds); finishes in well under ten seconds. The tolerance
/// scale tightens or loosens every threshold at once — passing a tiny value
/// exercises the failure reporting path.
std::vector<SelfCheckItem> selfcheck(double tolerance_scale = 1.0);

/// Structural validation of a summary document against the bundled
/// eerds-summary/1 schema. Returns true when the document conforms.
bool validate_summary(const std::string& summary_json, const std::string& schema_json,
                      std::string* error);

/// The eerds-summary/1 schema document (also shipped at docs/).
const std::string& summary_schema_v1();

}  // namespace eerds
