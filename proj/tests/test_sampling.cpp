#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "fqr/metrics.hpp"
#include "fqr/rng.hpp"
#include "fqr/sampling.hpp"
#include "fqr/simulate.hpp"
#include "fqr/solver.hpp"

using namespace fqr;

TEST_CASE("prob_uniform") {
  const Eigen::VectorXd p4 = probUniform(4);
  CHECK((p4.array() - 0.25).abs().maxCoeff() == 0.0);
  CHECK(probUniform(1)[0] == doctest::Approx(1.0));
  CHECK(std::abs(probUniform(100000).sum() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(probUniform(0), std::invalid_argument);
}

TEST_CASE("prob_flopt: ratios, symmetry, zero-norm floor") {
  DesignMatrix design;
  design.scores.resize(3, 2);
  design.scores << 1, 0, 0, 1, 2, 0;
  const Eigen::VectorXd p = probFlopt(design);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(p[2] == doctest::Approx(0.5));

  design.scores = Eigen::MatrixXd::Ones(5, 2);
  CHECK((probFlopt(design).array() - 0.2).abs().maxCoeff() <= 1e-14);

  design.scores.row(2).setZero();
  const Eigen::VectorXd floored = probFlopt(design);
  CHECK(floored.minCoeff() > 0.0);
  CHECK(std::abs(floored.sum() - 1.0) <= 1e-12);
  // Inverse weights stay finite even for the floored row.
  CHECK(std::isfinite(1.0 / (5.0 * floored.minCoeff())));

  design.scores.setZero();
  CHECK_THROWS(probFlopt(design));
}

TEST_CASE("prob_flopt matches quadrature oracle on random curves") {
  SimulationConfig cfg;
  cfg.n = 3;
  cfg.grid_size = 501;
  cfg.seed = 12;
  const FunctionalDataset data = genCovariates(cfg);
  auto basis = std::make_shared<const BSplineBasis>(4, 3);
  const DesignMatrix design = computeScores(data, basis);
  // Hand quadrature of the score norms.
  const Eigen::VectorXd w = trapezoidWeights(data.grid);
  const Eigen::MatrixXd basis_vals = basis->evaluateMany(data.grid);
  Eigen::VectorXd norms(3);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd score = Eigen::VectorXd::Zero(basis->dimension());
    for (int j = 0; j < data.grid.size(); ++j) {
      score += w[j] * data.curves(i, j) * basis_vals.row(j).transpose();
    }
    norms[i] = score.norm();
  }
  const Eigen::VectorXd expected = norms / norms.sum();
  CHECK((probFlopt(design) - expected).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("prob_faopt: identity and scaled identity reduce to flopt") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  DesignMatrix design;
  design.scores.resize(20, 4);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 4; ++j) design.scores(i, j) = gauss(rng);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd fl = probFlopt(design);
  CHECK((probFaopt(design, I) - fl).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((probFaopt(design, 3.7 * I) - fl).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("prob_faopt: hand-computed diagonal case and conditioning guard") {
  DesignMatrix design;
  design.scores.resize(2, 2);
  design.scores << 1, 0, 0, 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
  H(0, 0) = 1.0;
  H(1, 1) = 10.0;
  const Eigen::VectorXd p = probFaopt(design, H);
  CHECK(p[0] == doctest::Approx(10.0 / 11.0));
  CHECK(p[1] == doctest::Approx(1.0 / 11.0));

  H(1, 1) = 1e-14;
  CHECK_THROWS_AS(probFaopt(design, H), std::runtime_error);
}

TEST_CASE("density estimate at zero") {
  std::mt19937_64 rng(19);
  const int m = 10000;
  Eigen::VectorXd normal(m), unif(m);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < m; ++i) {
    normal[i] = gauss(rng);
    unif[i] = u(rng);
  }
  CHECK(std::abs(estimateDensityAtZero(normal) - 0.3989) <= 0.03);
  CHECK(std::abs(estimateDensityAtZero(unif) - 1.0) <= 0.08);

  CHECK(estimateDensityAtZero(Eigen::VectorXd::Constant(100, 1.5)) >= 1e-6);
  CHECK_THROWS_AS(estimateDensityAtZero(Eigen::VectorXd::Zero(10)), std::invalid_argument);
}

TEST_CASE("faopt pipeline: determinism, flopt correlation, pilot floor") {
  SimulationConfig cfg;
  cfg.n = 5000;
  cfg.seed = 40;
  FunctionalDataset data = genCovariates(cfg);
  const Eigen::VectorXd y = genResponses(data, ErrorDist::Normal, 41);
  auto basis = std::make_shared<const BSplineBasis>(4, 3);
  const DesignMatrix design = computeScores(data, basis);
  const PenaltyMatrix D = penaltyMatrix(*basis, 2);

  const Eigen::VectorXd p1 = faoptPipeline(design, y, 0.5, 0.01, D, 400, 7);
  const Eigen::VectorXd p2 = faoptPipeline(design, y, 0.5, 0.01, D, 400, 7);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(p1.sum() - 1.0) <= 1e-12);

  // Oracle comparison: the pilot only sets a scalar density estimate, so the
  // pipeline output must be nearly the exact A-optimal probabilities built
  // from a full-data fit.
  const Eigen::MatrixXd D_mat = D.matrix;
  const FittedModel full = fitPirls(design.scores, y, 0.5, 0.01, D_mat);
  const double f0 = estimateDensityAtZero(y - design.scores * full.theta);
  const Eigen::MatrixXd H =
      f0 * gramG(design) + (0.01 / double(cfg.n)) * D_mat;
  const Eigen::VectorXd exact = probFaopt(design, H);
  CHECK((p1 - exact).cwiseAbs().maxCoeff() <= 1e-4);

  CHECK_THROWS_AS(faoptPipeline(design, y, 0.5, 0.01, D, 150, 7), std::invalid_argument);
}

TEST_CASE("draw_with_replacement: point mass, conservation, determinism") {
  Eigen::VectorXd probs(3);
  probs << 1.0 - 2e-12, 1e-12, 1e-12;
  const SubsamplePlan point = drawWithReplacement(probs, 5, 1);
  int total = 0;
  for (int c : point.counts) total += c;
  CHECK(total == 5);
  CHECK(point.indices[0] == 0);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng() % 50);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = 0.1 + double(rng() % 100);
    w /= w.sum();
    const int r = 1 + int(rng() % 100);
    const SubsamplePlan plan = drawWithReplacement(w, r, rng());
    int sum = 0;
    for (int c : plan.counts) sum += c;
    CHECK(sum == r);
    CHECK(int(plan.indices.size()) == int(plan.counts.size()));
  }

  const Eigen::VectorXd u = probUniform(10);
  const SubsamplePlan a = drawWithReplacement(u, 50, 99);
  const SubsamplePlan b = drawWithReplacement(u, 50, 99);
  CHECK(a.indices == b.indices);
  CHECK(a.counts == b.counts);
}

TEST_CASE("draw_with_replacement: multinomial concentration") {
  const Eigen::VectorXd probs = probUniform(4);
  const int r = 100000;
  const SubsamplePlan plan = drawWithReplacement(probs, r, 123);
  for (size_t j = 0; j < plan.indices.size(); ++j) {
    const double freq = double(plan.counts[j]) / double(r);
    const double pi = probs[plan.indices[j]];
    CHECK(std::abs(freq - pi) <= 3.0 * std::sqrt(pi * (1.0 - pi) / double(r)));
  }
}

TEST_CASE("probability constructors land on the simplex; scale invariance") {
  SimulationConfig cfg;
  cfg.n = 200;
  cfg.seed = 55;
  FunctionalDataset data = genCovariates(cfg);
  auto basis = std::make_shared<const BSplineBasis>(3, 3);
  const DesignMatrix design = computeScores(data, basis);
  const Eigen::MatrixXd H =
      gramG(design) + 0.1 * Eigen::MatrixXd::Identity(basis->dimension(), basis->dimension());

  for (const Eigen::VectorXd& p :
       {probUniform(200), probFlopt(design), probFaopt(design, H)}) {
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK(p.minCoeff() > 0.0);
  }

  FunctionalDataset scaled = data;
  scaled.curves *= 4.2;
  const DesignMatrix scaled_design = computeScores(scaled, basis);
  CHECK((probFlopt(scaled_design) - probFlopt(design)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("plans keep inverse weights bounded") {
  SimulationConfig cfg;
  cfg.n = 500;
  cfg.seed = 61;
  FunctionalDataset data = genCovariates(cfg);
  auto basis = std::make_shared<const BSplineBasis>(3, 3);
  const DesignMatrix design = computeScores(data, basis);
  const SubsamplePlan plan = drawWithReplacement(probFlopt(design), 100, 5);
  double max_inv = 0.0;
  for (Eigen::Index i = 0; i < plan.probs.size(); ++i) {
    max_inv = std::max(max_inv, 1.0 / (double(plan.probs.size()) * plan.probs[i]));
  }
  CHECK(std::isfinite(max_inv));
}
