#include "fqr/tuning.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace fqr {

LambdaGrid LambdaGrid::logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 1) {
    throw std::invalid_argument("LambdaGrid: need 0 < lo < hi and count >= 1");
  }
  LambdaGrid grid;
  grid.values.reserve(count);
  if (count == 1) {
    grid.values.push_back(lo);
    return grid;
  }
  const double step = (std::log10(hi) - std::log10(lo)) / double(count - 1);
  for (int i = 0; i < count; ++i) {
    grid.values.push_back(std::pow(10.0, std::log10(lo) + step * i));
  }
  return grid;
}

double gacvScore(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
                 double lambda, const Eigen::MatrixXd& penalty,
                 const Eigen::VectorXd* case_weights, double* df_out) {
  const FittedModel fit = fitPirls(scores, y, tau, lambda, penalty, case_weights);

  // df = tr((B^T W B + (lambda/2) D)^{-1} B^T W B), never forming n x n.
  Eigen::MatrixXd wb = scores;
  wb.array().colwise() *= fit.pirls_weights.array().sqrt();
  const Eigen::Index d = scores.cols();
  Eigen::MatrixXd btwb = Eigen::MatrixXd::Zero(d, d);
  btwb.selfadjointView<Eigen::Lower>().rankUpdate(wb.transpose(), 1.0);
  btwb = btwb.selfadjointView<Eigen::Lower>();
  Eigen::MatrixXd A = btwb + 0.5 * lambda * penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) {
    A.diagonal().array() += 1e-10;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("gacvScore: normal matrix factorization failed");
    }
  }
  const double df = ldlt.solve(btwb).trace();
  if (df_out) *df_out = df;

  const Eigen::Index n = scores.rows();
  if (!(df < double(n))) {
    throw std::runtime_error("gacvScore: degenerate fit, df >= n");
  }
  const Eigen::VectorXd r = y - scores * fit.theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) loss += checkLoss(r[i], tau);
  return loss / (double(n) - df);
}

std::pair<double, std::vector<GacvEntry>> selectLambda(
    const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
    const LambdaGrid& grid, const Eigen::MatrixXd& penalty,
    const Eigen::VectorXd* case_weights) {
  if (grid.values.empty()) throw std::invalid_argument("selectLambda: empty grid");
  std::vector<GacvEntry> table;
  table.reserve(grid.values.size());
  std::string failures;
  double best_lambda = 0.0;
  double best_score = INFINITY;
  bool any = false;
  for (double lambda : grid.values) {
    try {
      GacvEntry entry;
      entry.lambda = lambda;
      entry.gacv = gacvScore(scores, y, tau, lambda, penalty, case_weights, &entry.df);
      table.push_back(entry);
      // <= so ties resolve toward the larger (smoother) lambda.
      if (entry.gacv <= best_score) {
        best_score = entry.gacv;
        best_lambda = lambda;
        any = true;
      }
    } catch (const std::exception& e) {
      failures += "lambda=" + std::to_string(lambda) + ": " + e.what() + "; ";
    }
  }
  if (!any) {
    throw std::runtime_error("selectLambda: all grid points failed: " + failures);
  }
  return {best_lambda, table};
}

}  // namespace fqr
