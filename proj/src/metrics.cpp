#include "fqr/metrics.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace fqr {

namespace {

double rootIntegratedSquaredError(const Eigen::VectorXd& estimate,
                                  const Eigen::VectorXd& reference,
                                  const Eigen::VectorXd& weights) {
  const Eigen::ArrayXd diff = (estimate - reference).array();
  return std::sqrt((diff.square() * weights.array()).sum());
}

}  // namespace

double imse(const std::vector<Eigen::VectorXd>& estimates, const Eigen::VectorXd& truth,
            const Eigen::VectorXd& grid) {
  if (estimates.empty()) throw std::invalid_argument("imse: no repetitions");
  const Eigen::VectorXd w = trapezoidWeights(grid);
  double total = 0.0;
  for (const auto& est : estimates) {
    if (est.size() != truth.size() || est.size() != grid.size()) {
      throw std::invalid_argument("imse: evaluation grid mismatch");
    }
    total += rootIntegratedSquaredError(est, truth, w);
  }
  return total / double(estimates.size());
}

double eimse(const std::vector<Eigen::VectorXd>& estimates,
             const Eigen::VectorXd& full_data_estimate, const Eigen::VectorXd& grid) {
  return imse(estimates, full_data_estimate, grid);
}

namespace {

Eigen::VectorXd testPredictions(const FunctionalDataset& test, const Eigen::VectorXd& beta) {
  if (beta.size() != test.gridSize()) {
    throw std::invalid_argument("metrics: beta curve does not match the test grid");
  }
  return test.curves * trapezoidWeights(test.grid).cwiseProduct(beta);
}

}  // namespace

double predictionEfficiency(const FunctionalDataset& test, const Eigen::VectorXd& beta_sub,
                            const Eigen::VectorXd& beta_full, const Eigen::VectorXd& beta_true) {
  const Eigen::VectorXd p_true = testPredictions(test, beta_true);
  const Eigen::VectorXd p_sub = testPredictions(test, beta_sub);
  const Eigen::VectorXd p_full = testPredictions(test, beta_full);
  const double denom = (p_true - p_full).squaredNorm();
  if (!(denom > 0.0)) throw std::runtime_error("predictionEfficiency: zero denominator");
  return (p_true - p_sub).squaredNorm() / denom;
}

double relativeEfficiency(const FunctionalDataset& test, const Eigen::VectorXd& beta_sub,
                          const Eigen::VectorXd& beta_full) {
  const Eigen::VectorXd p_sub = testPredictions(test, beta_sub);
  const Eigen::VectorXd p_full = testPredictions(test, beta_full);
  const double denom = p_full.squaredNorm();
  if (!(denom > 0.0)) throw std::runtime_error("relativeEfficiency: zero denominator");
  return (p_sub - p_full).squaredNorm() / denom;
}

Eigen::MatrixXd samplingVariance(const DesignMatrix& design, const Eigen::VectorXd& probs) {
  const Eigen::Index n = design.scores.rows();
  if (probs.size() != n) throw std::invalid_argument("samplingVariance: length mismatch");
  if (!(probs.minCoeff() > 0.0)) throw std::domain_error("samplingVariance: non-positive prob");
  Eigen::MatrixXd scaled = design.scores;
  scaled.array().colwise() /= probs.array().sqrt();
  const Eigen::Index d = design.scores.cols();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d, d);
  V.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), 1.0 / double(n * n));
  return V.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd asymptoticVariance(const DesignMatrix& design, const Eigen::VectorXd& probs,
                                   const Eigen::MatrixXd& H_tau, int r, Eigen::Index n,
                                   double tau) {
  if (!design.basis) throw std::invalid_argument("asymptoticVariance: design lacks a basis");
  const double K = double(design.basis->interiorKnots());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H_tau);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("asymptoticVariance: H_tau factorization failed");
  }
  const double eta = double(r) / double(n);
  const Eigen::Index d = design.scores.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  G.selfadjointView<Eigen::Lower>().rankUpdate(design.scores.transpose(), 1.0 / double(n));
  G = G.selfadjointView<Eigen::Lower>();
  const Eigen::MatrixXd inner = samplingVariance(design, probs) + eta * G;
  const Eigen::MatrixXd left = ldlt.solve(inner);
  return (tau * (1.0 - tau) / K) * ldlt.solve(left.transpose()).transpose();
}

}  // namespace fqr
