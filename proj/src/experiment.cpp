#include "fqr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fqr/csv.hpp"
#include "fqr/metrics.hpp"
#include "fqr/rng.hpp"
#include "fqr/sampling.hpp"
#include "fqr/solver.hpp"

namespace fqr {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentSpec::validate() const {
  if (mode != "simulate" && mode != "real") {
    throw std::runtime_error("spec: mode must be 'simulate' or 'real'");
  }
  if (mode == "simulate") sim.validate();
  if (mode == "real" && (curves_csv.empty() || responses_csv.empty())) {
    throw std::runtime_error("spec: real mode needs data.curves and data.responses");
  }
  if (taus.empty()) throw std::runtime_error("spec: tau list is empty");
  for (double tau : taus) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::runtime_error("spec: tau must lie in (0,1)");
  }
  if (methods.empty()) throw std::runtime_error("spec: methods list is empty");
  for (const auto& m : methods) {
    if (m != "Unif" && m != "FLopt" && m != "FAopt" && m != "Full") {
      throw std::runtime_error("spec: unknown method '" + m + "'");
    }
  }
  if (repetitions < 1) throw std::runtime_error("spec: repetitions must be >= 1");
  if (K < 1 || p < 0 || q < 0 || q > p) throw std::runtime_error("spec: bad K/p/q");
  if (!lambda_gacv && lambda < 0.0) throw std::runtime_error("spec: lambda must be >= 0");
  for (int r : rs) {
    if (r < 1) throw std::runtime_error("spec: subsample sizes must be >= 1");
  }
}

namespace {

void rejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw std::runtime_error("config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

ExperimentSpec parseExperimentSpec(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("config: cannot open " + config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }

  rejectUnknownKeys(doc, {"mode", "seed", "tau", "r", "methods", "repetitions", "K", "p", "q",
                          "lambda", "lambda_grid", "pilot_size", "save_plans", "simulate",
                          "data"},
                    "top level");
  ExperimentSpec spec;
  try {
    if (doc.contains("mode")) spec.mode = doc["mode"].get<std::string>();
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("tau")) spec.taus = doc["tau"].get<std::vector<double>>();
    if (doc.contains("r")) spec.rs = doc["r"].get<std::vector<int>>();
    if (doc.contains("methods")) spec.methods = doc["methods"].get<std::vector<std::string>>();
    if (doc.contains("repetitions")) spec.repetitions = doc["repetitions"].get<int>();
    if (doc.contains("K")) spec.K = doc["K"].get<int>();
    if (doc.contains("p")) spec.p = doc["p"].get<int>();
    if (doc.contains("q")) spec.q = doc["q"].get<int>();
    if (doc.contains("pilot_size")) spec.pilot_size = doc["pilot_size"].get<int>();
    if (doc.contains("save_plans")) spec.save_plans = doc["save_plans"].get<bool>();
    if (doc.contains("lambda")) {
      if (doc["lambda"].is_string()) {
        if (doc["lambda"].get<std::string>() != "gacv") {
          throw std::runtime_error("config: lambda must be a number or \"gacv\"");
        }
        spec.lambda_gacv = true;
      } else {
        spec.lambda = doc["lambda"].get<double>();
      }
    }
    if (doc.contains("lambda_grid")) {
      const json& g = doc["lambda_grid"];
      rejectUnknownKeys(g, {"min", "max", "count"}, "lambda_grid");
      spec.lambda_grid = LambdaGrid::logspace(g.value("min", 1e-6), g.value("max", 1e2),
                                              g.value("count", 17));
    }
    if (doc.contains("simulate")) {
      const json& s = doc["simulate"];
      rejectUnknownKeys(s, {"n", "m_test", "coefficient_dist", "error_dist",
                            "generator_basis_size", "grid_size", "noise_scale"},
                        "simulate");
      spec.sim.n = s.value("n", 1000);
      spec.sim.m_test = s.value("m_test", 1000);
      if (s.contains("coefficient_dist")) {
        spec.sim.coefficient_dist = coefficientDistFromName(s["coefficient_dist"]);
      }
      if (s.contains("error_dist")) {
        spec.sim.error_dist = errorDistFromName(s["error_dist"]);
      }
      spec.sim.generator_basis_size = s.value("generator_basis_size", 10);
      spec.sim.grid_size = s.value("grid_size", 100);
      spec.sim.noise_scale = s.value("noise_scale", 1.0);
    }
    if (doc.contains("data")) {
      const json& d = doc["data"];
      rejectUnknownKeys(d, {"curves", "responses"}, "data");
      spec.curves_csv = d.value("curves", "");
      spec.responses_csv = d.value("responses", "");
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  spec.sim.seed = spec.seed;
  spec.validate();
  return spec;
}

namespace {

struct CellKey {
  std::string method;
  double tau;
  int r;
};

Eigen::VectorXd evalGrid200() {
  Eigen::VectorXd grid(200);
  for (int j = 0; j < 200; ++j) grid[j] = double(j) / 199.0;
  return grid;
}

std::string metricsHeader() { return "method,tau,r,metric,value,reps,seed\n"; }

}  // namespace

int runExperiment(const ExperimentSpec& spec, const std::string& out_dir) {
  spec.validate();
  fs::create_directories(out_dir);

  // Data.
  FunctionalDataset train;
  FunctionalDataset test;
  bool have_test = false;
  if (spec.mode == "simulate") {
    SimulationConfig train_cfg = spec.sim;
    train_cfg.seed = mixSeed(spec.seed, 0x747261696eULL);
    train = genCovariates(train_cfg);
    train.responses = genResponses(train, spec.sim.error_dist,
                                   mixSeed(spec.seed, 0x726573ULL), spec.sim.noise_scale);
    if (spec.sim.m_test > 0) {
      SimulationConfig test_cfg = spec.sim;
      test_cfg.n = spec.sim.m_test;
      test_cfg.seed = mixSeed(spec.seed, 0x74657374ULL);
      test = genCovariates(test_cfg);
      have_test = true;
    }
  } else {
    train = readCurvesCsv(spec.curves_csv);
    attachResponsesCsv(train, spec.responses_csv);
    test = train;  // real mode evaluates predictive agreement on the ingested curves
    have_test = true;
  }
  const Eigen::Index n = train.sampleCount();
  for (int r : spec.rs) {
    if (r > n) throw std::runtime_error("spec: subsample size exceeds n");
  }

  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, spec.q);
  const DesignMatrix design = computeScores(train, basis);
  const Eigen::VectorXd& y = *train.responses;
  const Eigen::VectorXd eval_grid = evalGrid200();
  const Eigen::MatrixXd eval_basis = basis->evaluateMany(eval_grid);
  Eigen::MatrixXd test_basis;
  if (have_test) test_basis = basis->evaluateMany(test.grid);
  const Eigen::VectorXd beta_truth =
      spec.mode == "simulate" ? trueBeta(eval_grid) : Eigen::VectorXd();

  const bool want_full = std::count(spec.methods.begin(), spec.methods.end(), "Full") > 0;

  std::ofstream metrics(fs::path(out_dir) / "metrics.csv");
  std::ofstream curves(fs::path(out_dir) / "beta_curves.csv");
  std::ofstream timings(fs::path(out_dir) / "timings.csv");
  metrics << metricsHeader();
  curves << "method,tau,r,rep";
  for (int j = 0; j < eval_grid.size(); ++j) curves << ",t" << j;
  curves << '\n';
  timings << "method,tau,r,rep,seconds\n";
  if (spec.save_plans) fs::create_directories(fs::path(out_dir) / "plans");

  auto writeCurveRow = [&](const std::string& method, double tau, int r, int rep,
                           const Eigen::VectorXd& beta) {
    curves << method << ',' << formatDouble(tau) << ',' << r << ',' << rep;
    for (Eigen::Index j = 0; j < beta.size(); ++j) curves << ',' << formatDouble(beta[j]);
    curves << '\n';
  };
  auto writeMetric = [&](const std::string& method, double tau, int r,
                         const std::string& name, double value, int reps) {
    metrics << method << ',' << formatDouble(tau) << ',' << r << ',' << name << ','
            << formatDouble(value) << ',' << reps << ',' << spec.seed << '\n';
  };

  int failed_cells = 0;
  for (size_t tau_idx = 0; tau_idx < spec.taus.size(); ++tau_idx) {
    const double tau = spec.taus[tau_idx];

    // Full-data reference fit, computed once per tau and reused.
    Eigen::VectorXd beta_full;
    Eigen::VectorXd beta_full_test;
    bool have_full = false;
    if (want_full) {
      try {
        double lambda_full = spec.lambda;
        if (spec.lambda_gacv) {
          lambda_full = selectLambda(design.scores, y, tau, spec.lambda_grid,
                                     penalty.matrix).first;
        }
        Stopwatch watch;
        const FittedModel full = fitPirls(design.scores, y, tau, lambda_full, penalty.matrix);
        const double secs = watch.seconds();
        beta_full = eval_basis * full.theta;
        if (have_test) beta_full_test = test_basis * full.theta;
        have_full = true;
        writeCurveRow("Full", tau, int(n), 0, beta_full);
        timings << "Full," << formatDouble(tau) << ',' << n << ",0," << formatDouble(secs)
                << '\n';
        if (spec.mode == "simulate") {
          writeMetric("Full", tau, int(n), "imse", imse({beta_full}, beta_truth, eval_grid), 1);
        }
        writeMetric("Full", tau, int(n), "lambda", lambda_full, 1);
      } catch (const std::exception& e) {
        std::cerr << "[run] Full fit failed (tau=" << tau << "): " << e.what() << '\n';
        ++failed_cells;
      }
    }

    for (const std::string& method : spec.methods) {
      if (method == "Full") continue;
      for (size_t r_idx = 0; r_idx < spec.rs.size(); ++r_idx) {
        const int r = spec.rs[r_idx];
        // Probabilities for this cell.
        Eigen::VectorXd probs;
        SamplingMethod tag = SamplingMethod::Unif;
        try {
          if (method == "Unif") {
            probs = probUniform(n);
          } else if (method == "FLopt") {
            tag = SamplingMethod::FLopt;
            probs = probFlopt(design);
          } else {
            tag = SamplingMethod::FAopt;
            const int r0 = spec.pilot_size > 0 ? spec.pilot_size : std::max(200, r / 2);
            probs = faoptPipeline(design, y, tau, spec.lambda, penalty, r0,
                                  mixSeed(spec.seed, 0x70696cULL, tau_idx * 1000 + r_idx));
          }
        } catch (const std::exception& e) {
          std::cerr << "[run] " << method << " probabilities failed (tau=" << tau
                    << ", r=" << r << "): " << e.what() << '\n';
          ++failed_cells;
          continue;
        }

        std::vector<Eigen::VectorXd> estimates;
        std::vector<double> pe_values, re_values;
        bool cell_failed = false;
        for (int rep = 0; rep < spec.repetitions; ++rep) {
          try {
            const std::uint64_t method_code = method == "Unif" ? 1 : method == "FLopt" ? 2 : 3;
            const std::uint64_t rep_seed =
                mixSeed(spec.seed, mixSeed(tau_idx, r_idx, std::uint64_t(rep)), method_code);
            Stopwatch watch;
            const SubsamplePlan plan = drawWithReplacement(probs, r, rep_seed, tag);
            double lambda_cell = spec.lambda;
            if (spec.lambda_gacv) {
              Eigen::MatrixXd sub(plan.indices.size(), design.scores.cols());
              Eigen::VectorXd sub_y(plan.indices.size()), cw(plan.indices.size());
              for (size_t j = 0; j < plan.indices.size(); ++j) {
                sub.row(j) = design.scores.row(plan.indices[j]);
                sub_y[j] = y[plan.indices[j]];
                cw[j] = double(plan.counts[j]) / (double(r) * plan.probs[plan.indices[j]]);
              }
              lambda_cell = selectLambda(sub, sub_y, tau, spec.lambda_grid, penalty.matrix,
                                         &cw).first;
            }
            const FittedModel fit = fitSubsample(design, y, tau, lambda_cell, penalty, plan);
            const double secs = watch.seconds();
            const Eigen::VectorXd beta = eval_basis * fit.theta;
            estimates.push_back(beta);
            writeCurveRow(method, tau, r, rep, beta);
            timings << method << ',' << formatDouble(tau) << ',' << r << ',' << rep << ','
                    << formatDouble(secs) << '\n';
            if (have_full && have_test) {
              const Eigen::VectorXd beta_test = test_basis * fit.theta;
              if (spec.mode == "simulate") {
                pe_values.push_back(predictionEfficiency(
                    test, beta_test, beta_full_test, trueBeta(test.grid)));
              }
              re_values.push_back(relativeEfficiency(test, beta_test, beta_full_test));
            }
            if (spec.save_plans) {
              writePlanCsv((fs::path(out_dir) / "plans" /
                            (method + "_tau" + std::to_string(tau_idx) + "_r" +
                             std::to_string(r) + "_rep" + std::to_string(rep) + ".csv"))
                               .string(),
                           plan);
            }
          } catch (const std::exception& e) {
            std::cerr << "[run] " << method << " rep failed (tau=" << tau << ", r=" << r
                      << ", rep=" << rep << "): " << e.what() << '\n';
            cell_failed = true;
          }
        }
        if (cell_failed || estimates.empty()) ++failed_cells;
        if (!estimates.empty()) {
          const int reps = int(estimates.size());
          if (spec.mode == "simulate") {
            writeMetric(method, tau, r, "imse", imse(estimates, beta_truth, eval_grid), reps);
          }
          if (have_full) {
            writeMetric(method, tau, r, "eimse", eimse(estimates, beta_full, eval_grid), reps);
          }
          if (!pe_values.empty()) {
            double mean_pe = 0.0;
            for (double v : pe_values) mean_pe += v;
            writeMetric(method, tau, r, "pe", mean_pe / pe_values.size(), reps);
          }
          if (!re_values.empty()) {
            double mean_re = 0.0;
            for (double v : re_values) mean_re += v;
            writeMetric(method, tau, r, "re", mean_re / re_values.size(), reps);
          }
        }
      }
    }
  }

  // Manifest: the resolved spec plus the wall-clock (timestamps live here
  // only, so metric CSVs stay reproducible).
  json manifest;
  manifest["mode"] = spec.mode;
  manifest["seed"] = spec.seed;
  manifest["tau"] = spec.taus;
  manifest["r"] = spec.rs;
  manifest["methods"] = spec.methods;
  manifest["repetitions"] = spec.repetitions;
  manifest["K"] = spec.K;
  manifest["p"] = spec.p;
  manifest["q"] = spec.q;
  manifest["lambda"] = spec.lambda_gacv ? json("gacv") : json(spec.lambda);
  manifest["n"] = n;
  if (spec.mode == "simulate") {
    manifest["simulate"] = {{"n", spec.sim.n},
                            {"m_test", spec.sim.m_test},
                            {"coefficient_dist", coefficientDistName(spec.sim.coefficient_dist)},
                            {"error_dist", errorDistName(spec.sim.error_dist)},
                            {"generator_basis_size", spec.sim.generator_basis_size},
                            {"grid_size", spec.sim.grid_size},
                            {"noise_scale", spec.sim.noise_scale}};
  } else {
    manifest["data"] = {{"curves", spec.curves_csv}, {"responses", spec.responses_csv}};
  }
  manifest["failed_cells"] = failed_cells;
  manifest["finished_at"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';

  return failed_cells > 0 ? 1 : 0;
}

}  // namespace fqr
