#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "fqr/solver.hpp"

namespace fqr {

struct LambdaGrid {
  std::vector<double> values;

  /// Log-spaced grid, default 1e-6 .. 1e2 with 17 points.
  static LambdaGrid logspace(double lo = 1e-6, double hi = 1e2, int count = 17);
};

struct GacvEntry {
  double lambda = 0.0;
  double gacv = 0.0;
  double df = 0.0;
};

/// GACV(lambda) = sum_i rho_tau(y_i - B_i^T theta) / (n - df_lambda) with
/// df_lambda = tr(B (B^T W B + (lambda/2) D)^{-1} B^T W) evaluated as a
/// d x d trace using the converged PIRLS W. The numerator is the plain
/// (unweighted) check loss over the supplied rows. df >= n is an error.
double gacvScore(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
                 double lambda, const Eigen::MatrixXd& penalty,
                 const Eigen::VectorXd* case_weights = nullptr, double* df_out = nullptr);

/// Grid search for the GACV minimizer; ties break toward the larger lambda.
/// Returns the winner plus the full score table (one row per grid point).
std::pair<double, std::vector<GacvEntry>> selectLambda(
    const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
    const LambdaGrid& grid, const Eigen::MatrixXd& penalty,
    const Eigen::VectorXd* case_weights = nullptr);

}  // namespace fqr
