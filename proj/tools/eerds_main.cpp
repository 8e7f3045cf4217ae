#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "eerds/runner.hpp"
#include "eerds/scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_output_dir() {
  if (const char* env = std::getenv("EERDS_OUTPUT_DIR")) return env;
  return "eerds-out";
}

eerds::StageToggles parse_stages(const std::string& csv) {
  eerds::StageToggles toggles{false, false, false, false};
  std::string tok;
  std::istringstream is(csv);
  while (std::getline(is, tok, ',')) {
    if (tok == "electro") toggles.electro = true;
    else if (tok == "dual") toggles.dual = true;
    else if (tok == "direct") toggles.direct = true;
    else if (tok == "evolve") toggles.evolve = true;
    else throw CLI::ValidationError("--stages", "unknown stage '" + tok + "'");
  }
  return toggles;
}

int run_one(const std::string& path, const std::string& outdir,
            const eerds::RunOverrides& overrides) {
  try {
    const eerds::Scenario sc = eerds::load_scenario(path);
    const eerds::RunOutcome outcome = eerds::run_scenario(sc, outdir, overrides);
    if (outcome.infeasible) {
      std::cerr << path << ": infeasible (E0 <= V = " << outcome.minimal_energy
                << ")\n";
    }
    for (const std::string& f : outcome.failures) {
      std::cerr << path << ": " << f << "\n";
    }
    std::cout << path << (outcome.pass ? ": pass" : ": fail") << " -> "
              << outcome.summary_path << "\n";
    return outcome.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << path << ": error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibria of electro-energy-reaction-diffusion systems"};
  app.require_subcommand(1);

  std::string scenario_path, batch_dir;
  std::string output_dir = default_output_dir();
  std::string stages_csv;
  double tol_grad = -1.0;
  int seed = -1;
  bool emit_dat = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario pipeline");
  run->add_option("scenario", scenario_path, "scenario file");
  run->add_option("-o,--output", output_dir, "output directory");
  run->add_option("--stages", stages_csv,
                  "comma-separated subset of electro,dual,direct,evolve");
  run->add_option("--tol-grad", tol_grad, "override the dual gradient tolerance");
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--batch", batch_dir,
                  "run every *.scenario file in a directory concurrently");
  run->add_flag("--emit-dat", emit_dat, "also write gnuplot-style .dat files");

  CLI::App* self = app.add_subcommand("selfcheck", "run the fast invariant suite");

  CLI11_PARSE(app, argc, argv);

  if (self->parsed()) {
    const std::vector<eerds::SelfCheckItem> items = eerds::selfcheck();
    bool all = true;
    std::cout << std::left << std::setw(28) << "check" << std::setw(8)
              << "result" << "detail\n";
    for (const auto& item : items) {
      all = all && item.pass;
      std::cout << std::left << std::setw(28) << item.name << std::setw(8)
                << (item.pass ? "pass" : "FAIL") << item.detail << "\n";
    }
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? 0 : 1;
  }

  eerds::RunOverrides overrides;
  if (!stages_csv.empty()) overrides.stages = parse_stages(stages_csv);
  if (tol_grad > 0.0) overrides.tol_grad = tol_grad;
  if (seed >= 0) overrides.seed = static_cast<unsigned>(seed);
  overrides.emit_dat = emit_dat;

  if (!batch_dir.empty()) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(batch_dir)) {
      if (entry.path().extension() == ".scenario") {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "no *.scenario files in " << batch_dir << "\n";
      return 2;
    }
    std::vector<int> results(files.size(), 0);
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < files.size(); ++i) {
      workers.emplace_back([&, i] {
        const std::string stem = fs::path(files[i]).stem().string();
        results[i] = run_one(files[i], (fs::path(output_dir) / stem).string(),
                             overrides);
      });
    }
    for (auto& w : workers) w.join();
    int status = 0;
    for (int r : results) status = std::max(status, r);
    return status;
  }

  if (scenario_path.empty()) {
    std::cerr << "run: a scenario file or --batch directory is required\n";
    return 2;
  }
  return run_one(scenario_path, output_dir, overrides);
}
