// Command-line front end: subsampling experiments for scalar-on-function
// quantile regression. See README.md for the config schema.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fqr/csv.hpp"
#include "fqr/experiment.hpp"
#include "fqr/metrics.hpp"
#include "fqr/rng.hpp"
#include "fqr/sampling.hpp"
#include "fqr/solver.hpp"

namespace fs = std::filesystem;
using namespace fqr;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::int64_t seed = -1;  // -1: keep the config's seed
};

void addCommon(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON config file")->required();
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "seed override");
}

ExperimentSpec loadSpec(const CommonArgs& args) {
  ExperimentSpec spec = parseExperimentSpec(args.config);
  if (args.seed >= 0) {
    spec.seed = std::uint64_t(args.seed);
    spec.sim.seed = spec.seed;
  }
  return spec;
}

FunctionalDataset loadTrain(const ExperimentSpec& spec) {
  if (spec.mode == "simulate") {
    SimulationConfig cfg = spec.sim;
    cfg.seed = mixSeed(spec.seed, 0x747261696eULL);
    FunctionalDataset data = genCovariates(cfg);
    data.responses = genResponses(data, spec.sim.error_dist, mixSeed(spec.seed, 0x726573ULL),
                                  spec.sim.noise_scale);
    return data;
  }
  FunctionalDataset data = readCurvesCsv(spec.curves_csv);
  attachResponsesCsv(data, spec.responses_csv);
  return data;
}

Eigen::VectorXd cellProbs(const std::string& method, const DesignMatrix& design,
                          const Eigen::VectorXd& y, const ExperimentSpec& spec, double tau,
                          int r) {
  if (method == "Unif") return probUniform(design.scores.rows());
  if (method == "FLopt") return probFlopt(design);
  const PenaltyMatrix penalty = penaltyMatrix(*design.basis, spec.q);
  const int r0 = spec.pilot_size > 0 ? spec.pilot_size : std::max(200, r / 2);
  return faoptPipeline(design, y, tau, spec.lambda, penalty, r0, mixSeed(spec.seed, 0x70696cULL));
}

void writeBetaCurve(const std::string& path, const Eigen::VectorXd& grid,
                    const Eigen::VectorXd& beta) {
  std::ofstream out(path);
  out << "t,beta\n";
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    out << formatDouble(grid[j]) << ',' << formatDouble(beta[j]) << '\n';
  }
}

Eigen::VectorXd grid200() {
  Eigen::VectorXd g(200);
  for (int j = 0; j < 200; ++j) g[j] = double(j) / 199.0;
  return g;
}

int cmdSimulate(const CommonArgs& args) {
  const ExperimentSpec spec = loadSpec(args);
  if (spec.mode != "simulate") throw std::runtime_error("simulate: config must have mode=simulate");
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  writeCurvesCsv((fs::path(args.out) / "curves.csv").string(), train);
  writeResponsesCsv((fs::path(args.out) / "responses.csv").string(), train);
  if (spec.sim.m_test > 0) {
    SimulationConfig cfg = spec.sim;
    cfg.n = spec.sim.m_test;
    cfg.seed = mixSeed(spec.seed, 0x74657374ULL);
    writeCurvesCsv((fs::path(args.out) / "test_curves.csv").string(), genCovariates(cfg));
  }
  std::cout << "wrote " << train.sampleCount() << " curves to " << args.out << '\n';
  return 0;
}

int cmdFit(const CommonArgs& args) {
  const ExperimentSpec spec = loadSpec(args);
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const DesignMatrix design = computeScores(train, basis);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, spec.q);
  const double tau = spec.taus.front();
  double lambda = spec.lambda;
  if (spec.lambda_gacv) {
    lambda = selectLambda(design.scores, *train.responses, tau, spec.lambda_grid,
                          penalty.matrix).first;
  }
  const FittedModel fit =
      fitPirls(design.scores, *train.responses, tau, lambda, penalty.matrix);
  const Eigen::VectorXd residuals = *train.responses - predict(fit, design);
  const double neg_fraction =
      double((residuals.array() < 0.0).count()) / double(residuals.size());

  std::cout << "tau=" << tau << " lambda=" << lambda << " converged=" << fit.converged
            << " iterations=" << fit.iterations_used << '\n';
  std::cout << "objective=" << fit.final_objective << '\n';
  std::cout << "negative-residual fraction=" << neg_fraction << " (target " << tau << ")\n";
  std::cout << "theta=";
  for (Eigen::Index k = 0; k < fit.theta.size(); ++k) std::cout << ' ' << fit.theta[k];
  std::cout << '\n';
  const Eigen::VectorXd grid = grid200();
  writeBetaCurve((fs::path(args.out) / "beta_full.csv").string(), grid,
                 evalBeta(fit, *basis, grid));
  return 0;
}

int cmdProbs(const CommonArgs& args, const std::string& method) {
  const ExperimentSpec spec = loadSpec(args);
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const DesignMatrix design = computeScores(train, basis);
  const Eigen::VectorXd probs = cellProbs(method, design, *train.responses, spec,
                                          spec.taus.front(), spec.rs.front());
  std::ofstream out(fs::path(args.out) / "probs.csv");
  out << "index,prob\n";
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    out << i << ',' << formatDouble(probs[i]) << '\n';
  }
  std::cout << "wrote probabilities (" << method << ") for n=" << probs.size() << '\n';
  return 0;
}

int cmdSubsampleFit(const CommonArgs& args, const std::string& method) {
  const ExperimentSpec spec = loadSpec(args);
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const DesignMatrix design = computeScores(train, basis);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, spec.q);
  const double tau = spec.taus.front();
  const int r = spec.rs.front();
  const Eigen::VectorXd probs = cellProbs(method, design, *train.responses, spec, tau, r);
  const SamplingMethod tag = method == "Unif"    ? SamplingMethod::Unif
                             : method == "FLopt" ? SamplingMethod::FLopt
                                                 : SamplingMethod::FAopt;
  const SubsamplePlan plan =
      drawWithReplacement(probs, r, mixSeed(spec.seed, 0x737562ULL), tag);
  const FittedModel fit =
      fitSubsample(design, *train.responses, tau, spec.lambda, penalty, plan);
  writePlanCsv((fs::path(args.out) / "plan.csv").string(), plan);
  const Eigen::VectorXd grid = grid200();
  writeBetaCurve((fs::path(args.out) / "beta_sub.csv").string(), grid,
                 evalBeta(fit, *basis, grid));
  std::cout << "subsample fit (" << method << ", r=" << r << "): objective "
            << fit.final_objective << ", converged=" << fit.converged << '\n';
  return 0;
}

int cmdTune(const CommonArgs& args) {
  const ExperimentSpec spec = loadSpec(args);
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const DesignMatrix design = computeScores(train, basis);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, spec.q);
  const auto [best, table] = selectLambda(design.scores, *train.responses, spec.taus.front(),
                                          spec.lambda_grid, penalty.matrix);
  std::ofstream out(fs::path(args.out) / "gacv.csv");
  out << "lambda,gacv,df\n";
  for (const auto& entry : table) {
    out << formatDouble(entry.lambda) << ',' << formatDouble(entry.gacv) << ','
        << formatDouble(entry.df) << '\n';
  }
  std::cout << "selected lambda=" << best << '\n';
  return 0;
}

int cmdBench(const CommonArgs& args) {
  const ExperimentSpec spec = loadSpec(args);
  fs::create_directories(args.out);
  const FunctionalDataset train = loadTrain(spec);
  auto basis = std::make_shared<const BSplineBasis>(spec.K, spec.p);
  const DesignMatrix design = computeScores(train, basis);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, spec.q);
  const Eigen::VectorXd& y = *train.responses;
  const double tau = spec.taus.front();
  const int r = spec.rs.front();

  std::ofstream out(fs::path(args.out) / "bench.csv");
  out << "method,rep,seconds\n";
  for (const std::string& method : spec.methods) {
    std::vector<double> secs;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      Stopwatch watch;
      if (method == "Full") {
        fitPirls(design.scores, y, tau, spec.lambda, penalty.matrix);
      } else {
        // Whole-pipeline scoping: probabilities + draw + subsample fit.
        const Eigen::VectorXd probs = cellProbs(method, design, y, spec, tau, r);
        const SubsamplePlan plan = drawWithReplacement(
            probs, r, mixSeed(spec.seed, std::uint64_t(rep)), SamplingMethod::Unif);
        fitSubsample(design, y, tau, spec.lambda, penalty, plan);
      }
      secs.push_back(watch.seconds());
      out << method << ',' << rep << ',' << formatDouble(secs.back()) << '\n';
    }
    std::sort(secs.begin(), secs.end());
    std::cout << method << " median seconds: " << secs[secs.size() / 2] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal subsampling for scalar-on-function quantile regression"};
  app.require_subcommand(1);

  CommonArgs sim_args, fit_args, probs_args, sub_args, tune_args, bench_args, run_args;
  std::string probs_method = "FLopt", sub_method = "FLopt";

  addCommon(app.add_subcommand("simulate", "emit a synthetic dataset to CSV"), sim_args);
  addCommon(app.add_subcommand("fit", "full-data fit"), fit_args);
  auto* probs_cmd = app.add_subcommand("probs", "compute a probability vector");
  addCommon(probs_cmd, probs_args);
  probs_cmd->add_option("--method", probs_method, "Unif | FLopt | FAopt");
  auto* sub_cmd = app.add_subcommand("subsample-fit", "one plan + one fit");
  addCommon(sub_cmd, sub_args);
  sub_cmd->add_option("--method", sub_method, "Unif | FLopt | FAopt");
  addCommon(app.add_subcommand("tune", "GACV table over a lambda grid"), tune_args);
  addCommon(app.add_subcommand("bench", "per-method timing protocol"), bench_args);
  addCommon(app.add_subcommand("run", "full experiment driver"), run_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate")) return cmdSimulate(sim_args);
    if (app.got_subcommand("fit")) return cmdFit(fit_args);
    if (app.got_subcommand("probs")) return cmdProbs(probs_args, probs_method);
    if (app.got_subcommand("subsample-fit")) return cmdSubsampleFit(sub_args, sub_method);
    if (app.got_subcommand("tune")) return cmdTune(tune_args);
    if (app.got_subcommand("bench")) return cmdBench(bench_args);
    if (app.got_subcommand("run")) {
      const ExperimentSpec spec = loadSpec(run_args);
      return runExperiment(spec, run_args.out);
    }
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << '\n';
    return what.rfind("config", 0) == 0 || what.rfind("spec", 0) == 0 ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
