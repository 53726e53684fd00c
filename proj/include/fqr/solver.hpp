#pragma once

#include <Eigen/Core>

#include <memory>

#include "fqr/design.hpp"
#include "fqr/sampling.hpp"

namespace fqr {

/// Quantile check loss rho_tau(u) = u (tau - 1{u<0}). Requires tau in (0,1).
double checkLoss(double u, double tau);

/// Subgradient psi_tau(u) = tau - 1{u<0}; returns tau at u = 0.
double checkSubgradient(double u, double tau);

struct PirlsOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double residual_guard = 1e-6;  // |r| below this is clamped, sign-preserving
};

struct FittedModel {
  Eigen::VectorXd theta;
  double tau = 0.5;
  double lambda = 0.0;
  std::shared_ptr<const BSplineBasis> basis;  // null for raw matrix fits
  int iterations_used = 0;
  bool converged = false;
  double final_objective = 0.0;
  Eigen::VectorXd pirls_weights;  // converged W diagonal (includes case weights)
};

/// Penalized IRLS for min sum_i cw_i rho_tau(y_i - B_i^T theta)
///                       + (lambda/2) theta^T D theta.
/// case_weights default to all ones. Non-convergence returns the best
/// iterate with converged=false; a singular normal matrix (after the 1e-10
/// ridge retry) throws std::runtime_error.
FittedModel fitPirls(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
                     double lambda, const Eigen::MatrixXd& penalty,
                     const Eigen::VectorXd* case_weights = nullptr,
                     const PirlsOptions& opts = {});

struct OracleOptions {
  long steps = 100000;
  double step_scale = 1.0;
};

/// Independent verification oracle: subgradient descent with diminishing
/// steps on the same objective, returning the best-objective iterate.
/// Intended for small instances only (d <= 10, n <= 500); slow by design.
FittedModel fitOracleSubgradient(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y,
                                 double tau, double lambda, const Eigen::MatrixXd& penalty,
                                 const Eigen::VectorXd* case_weights = nullptr,
                                 const OracleOptions& opts = {});

/// Full-data pipeline: scores -> penalty -> PIRLS with unit case weights.
FittedModel fitFull(const FunctionalDataset& dataset, std::shared_ptr<const BSplineBasis> basis,
                    double tau, double lambda, int penalty_order,
                    const PirlsOptions& opts = {});

/// Inverse-probability-weighted subsample fit: PIRLS restricted to the
/// selected rows with case weights R_i / (r pi_i); the penalty term is not
/// rescaled.
FittedModel fitSubsample(const DesignMatrix& design, const Eigen::VectorXd& y, double tau,
                         double lambda, const PenaltyMatrix& penalty,
                         const SubsamplePlan& plan, const PirlsOptions& opts = {});

/// Fitted conditional quantiles B_i^T theta.
Eigen::VectorXd predict(const FittedModel& model, const DesignMatrix& design);

/// Pointwise slope function values B(t)^T theta on a grid.
Eigen::VectorXd evalBeta(const FittedModel& model, const BSplineBasis& basis,
                         const Eigen::VectorXd& t_grid);

}  // namespace fqr
