#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fqr/simulate.hpp"
#include "fqr/tuning.hpp"

namespace fqr {

/// Resolved experiment configuration (see README for the config file
/// schema). Parsing is fail-closed: unknown keys are errors.
struct ExperimentSpec {
  std::string mode = "simulate";  // "simulate" | "real"
  SimulationConfig sim;
  std::string curves_csv;      // real mode
  std::string responses_csv;   // real mode
  std::vector<double> taus{0.5};
  std::vector<int> rs{1000};
  std::vector<std::string> methods{"Unif"};  // Unif | FLopt | FAopt | Full
  int repetitions = 1;
  int K = 10;
  int p = 3;
  int q = 2;
  bool lambda_gacv = false;
  double lambda = 0.001;
  LambdaGrid lambda_grid = LambdaGrid::logspace();
  int pilot_size = 0;  // 0 -> max(200, r/2)
  bool save_plans = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Parse a JSON config file. Throws std::runtime_error on any schema
/// violation, including unknown keys.
ExperimentSpec parseExperimentSpec(const std::string& config_path);

/// Run the full experiment loop: per (method, tau, r, rep) draw a plan,
/// optionally tune lambda by GACV on the subsample, fit, evaluate the slope
/// on a 200-point grid, and aggregate metrics. Writes metrics.csv,
/// beta_curves.csv, timings.csv, manifest.json (and plans/ when enabled)
/// under out_dir. Returns 0 on success, 1 when any cell failed. Identical
/// spec+seed reproduce byte-identical metrics.csv and beta_curves.csv.
int runExperiment(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace fqr
