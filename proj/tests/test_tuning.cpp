#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "fqr/rng.hpp"
#include "fqr/simulate.hpp"
#include "fqr/tuning.hpp"

using namespace fqr;

namespace {

struct Problem {
  Eigen::MatrixXd scores;
  Eigen::VectorXd y;
  Eigen::MatrixXd penalty;
  int dim = 0;
};

Problem makeProblem(int n, std::uint64_t seed, double noise = 1.0) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.noise_scale = noise;
  FunctionalDataset data = genCovariates(cfg);
  auto basis = std::make_shared<const BSplineBasis>(6, 3);
  Problem p;
  p.scores = computeScores(data, basis).scores;
  p.penalty = penaltyMatrix(*basis, 2).matrix;
  p.y = genResponses(data, ErrorDist::Normal, mixSeed(seed, 1), noise);
  p.dim = basis->dimension();
  return p;
}

}  // namespace

TEST_CASE("lambda grid defaults") {
  const LambdaGrid grid = LambdaGrid::logspace();
  REQUIRE(grid.values.size() == 17);
  CHECK(grid.values.front() == doctest::Approx(1e-6));
  CHECK(grid.values.back() == doctest::Approx(1e2));
  for (size_t i = 1; i < grid.values.size(); ++i) {
    CHECK(grid.values[i] > grid.values[i - 1]);
  }
}

TEST_CASE("df limits: penalty dominance and near-interpolation") {
  const Problem p = makeProblem(400, 3);
  double df = 0.0;
  gacvScore(p.scores, p.y, 0.5, 1e8, p.penalty, nullptr, &df);
  CHECK(std::abs(df - 2.0) <= 0.1);  // second-order penalty null space

  // Square system with negligible penalty: df approaches d.
  Problem sq = makeProblem(600, 4);
  sq.scores.conservativeResize(sq.dim, Eigen::NoChange);
  sq.y.conservativeResize(sq.dim);
  double df_interp = 0.0;
  gacvScore(sq.scores, sq.y, 0.5, 1e-12, sq.penalty, nullptr, &df_interp);
  CHECK(std::abs(df_interp - double(sq.dim)) <= 0.1);
}

TEST_CASE("gacv scores are deterministic") {
  const Problem p = makeProblem(300, 9);
  for (double lambda : {0.01, 1.0}) {
    const double a = gacvScore(p.scores, p.y, 0.75, lambda, p.penalty);
    const double b = gacvScore(p.scores, p.y, 0.75, lambda, p.penalty);
    CHECK(a == b);
  }
}

TEST_CASE("df is non-increasing in lambda; bounded by (0, d]") {
  const Problem p = makeProblem(500, 21);
  const LambdaGrid grid = LambdaGrid::logspace();
  double prev_df = INFINITY;
  for (double lambda : grid.values) {
    double df = 0.0;
    gacvScore(p.scores, p.y, 0.5, lambda, p.penalty, nullptr, &df);
    CHECK(df > 0.0);
    CHECK(df <= double(p.dim) + 1e-8);
    CHECK(df <= prev_df + 0.05);  // tolerance for PIRLS weight drift
    prev_df = df;
  }
}

TEST_CASE("select_lambda: single-point grid and score table contract") {
  const Problem p = makeProblem(300, 33);
  LambdaGrid single;
  single.values = {0.25};
  const auto [best, table] = selectLambda(p.scores, p.y, 0.5, single, p.penalty);
  CHECK(best == doctest::Approx(0.25));
  REQUIRE(table.size() == 1);

  const LambdaGrid grid = LambdaGrid::logspace(1e-4, 1e1, 9);
  const auto [b2, t2] = selectLambda(p.scores, p.y, 0.5, grid, p.penalty);
  CHECK(t2.size() == grid.values.size());
  for (const auto& entry : t2) {
    CHECK(std::isfinite(entry.gacv));
    CHECK(std::isfinite(entry.df));
  }
  CHECK(std::count(grid.values.begin(), grid.values.end(), b2) == 1);
}

TEST_CASE("smooth truth, low noise: interior optimum is typical") {
  const LambdaGrid grid = LambdaGrid::logspace(1e-8, 1e3, 12);
  int interior = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const Problem p = makeProblem(250, 1000 + rep, 0.05);
    const auto [best, table] = selectLambda(p.scores, p.y, 0.5, grid, p.penalty);
    if (best != grid.values.front() && best != grid.values.back()) ++interior;
  }
  CHECK(double(interior) / reps >= 0.8);
}
