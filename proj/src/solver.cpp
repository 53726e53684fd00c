#include "fqr/solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace fqr {

double checkLoss(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::domain_error("checkLoss: tau must lie in (0,1)");
  }
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

double checkSubgradient(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::domain_error("checkSubgradient: tau must lie in (0,1)");
  }
  return tau - (u < 0.0 ? 1.0 : 0.0);
}

namespace {

double objective(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& cw, double tau, double lambda,
                 const Eigen::MatrixXd& penalty, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd r = y - scores * theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) loss += cw[i] * checkLoss(r[i], tau);
  return loss + 0.5 * lambda * theta.dot(penalty * theta);
}

// SPD solve with a one-shot ridge retry.
Eigen::VectorXd solveNormal(Eigen::MatrixXd A, const Eigen::VectorXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (x.allFinite()) return x;
  }
  A.diagonal().array() += 1e-10;
  ldlt.compute(A);
  Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) {
    throw std::runtime_error("fitPirls: singular normal matrix");
  }
  return x;
}

}  // namespace

FittedModel fitPirls(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, double tau,
                     double lambda, const Eigen::MatrixXd& penalty,
                     const Eigen::VectorXd* case_weights, const PirlsOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("fitPirls: tau must lie in (0,1)");
  if (lambda < 0.0) throw std::domain_error("fitPirls: lambda must be >= 0");
  const Eigen::Index n = scores.rows();
  const Eigen::Index d = scores.cols();
  if (n < 1) throw std::invalid_argument("fitPirls: empty design");
  if (y.size() != n) throw std::invalid_argument("fitPirls: response length mismatch");

  Eigen::VectorXd cw = case_weights ? *case_weights : Eigen::VectorXd::Ones(n);
  if (cw.size() != n) throw std::invalid_argument("fitPirls: case weight length mismatch");
  if (!(cw.minCoeff() > 0.0)) throw std::domain_error("fitPirls: case weights must be positive");

  // The normal matrix carries lambda/2 so the PIRLS fixed point satisfies
  // the subgradient stationarity of the penalized check loss.
  const Eigen::MatrixXd half_pen = 0.5 * lambda * penalty;

  // Initialization: penalized least squares with the case weights.
  Eigen::MatrixXd wb = scores;
  wb.array().colwise() *= cw.array().sqrt();
  Eigen::MatrixXd A = half_pen;
  A.selfadjointView<Eigen::Lower>().rankUpdate(wb.transpose(), 1.0);
  A = A.selfadjointView<Eigen::Lower>();
  Eigen::VectorXd theta = solveNormal(A, scores.transpose() * (cw.asDiagonal() * y));

  const double delta = opts.residual_guard;
  Eigen::VectorXd w(n);
  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const Eigen::VectorXd r = y - scores * theta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ri = r[i];
      const double rc = std::abs(ri) < delta ? (ri < 0.0 ? -delta : delta) : ri;
      w[i] = cw[i] * (tau - (ri < 0.0 ? 1.0 : 0.0)) / (2.0 * rc);
    }
    wb = scores;
    wb.array().colwise() *= w.array().sqrt();
    A = half_pen;
    A.selfadjointView<Eigen::Lower>().rankUpdate(wb.transpose(), 1.0);
    A = A.selfadjointView<Eigen::Lower>();
    const Eigen::VectorXd theta_next = solveNormal(A, scores.transpose() * (w.asDiagonal() * y));
    const double step = (theta_next - theta).cwiseAbs().maxCoeff();
    theta = theta_next;
    if (step <= opts.tol) {
      converged = true;
      ++iter;
      break;
    }
  }

  FittedModel model;
  model.theta = theta;
  model.tau = tau;
  model.lambda = lambda;
  model.iterations_used = iter;
  model.converged = converged;
  model.final_objective = objective(scores, y, cw, tau, lambda, penalty, theta);
  model.pirls_weights = w;
  return model;
}

FittedModel fitOracleSubgradient(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y,
                                 double tau, double lambda, const Eigen::MatrixXd& penalty,
                                 const Eigen::VectorXd* case_weights,
                                 const OracleOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("fitOracleSubgradient: bad tau");
  const Eigen::Index n = scores.rows();
  const Eigen::Index d = scores.cols();
  Eigen::VectorXd cw = case_weights ? *case_weights : Eigen::VectorXd::Ones(n);

  // Independent start: ridge least squares, no reweighting.
  Eigen::MatrixXd A = 1e-8 * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd wb = scores;
  wb.array().colwise() *= cw.array().sqrt();
  A.selfadjointView<Eigen::Lower>().rankUpdate(wb.transpose(), 1.0);
  A = A.selfadjointView<Eigen::Lower>();
  Eigen::VectorXd theta = A.ldlt().solve(scores.transpose() * (cw.asDiagonal() * y));
  if (!theta.allFinite()) theta.setZero();

  Eigen::VectorXd best = theta;
  double best_obj = objective(scores, y, cw, tau, lambda, penalty, theta);
  const double radius = opts.step_scale * (1.0 + theta.norm());

  Eigen::VectorXd grad(d), r(n);
  for (long k = 1; k <= opts.steps; ++k) {
    r.noalias() = y - scores * theta;
    grad = lambda * (penalty * theta);
    for (Eigen::Index i = 0; i < n; ++i) {
      grad.noalias() -= (cw[i] * checkSubgradient(r[i], tau)) * scores.row(i).transpose();
    }
    const double gn = grad.norm();
    if (gn < 1e-14) break;
    theta -= (radius / std::sqrt(double(k))) * grad / gn;
    const double obj = objective(scores, y, cw, tau, lambda, penalty, theta);
    if (obj < best_obj) {
      best_obj = obj;
      best = theta;
    }
  }

  FittedModel model;
  model.theta = best;
  model.tau = tau;
  model.lambda = lambda;
  model.iterations_used = static_cast<int>(opts.steps);
  model.converged = true;
  model.final_objective = best_obj;
  return model;
}

FittedModel fitFull(const FunctionalDataset& dataset, std::shared_ptr<const BSplineBasis> basis,
                    double tau, double lambda, int penalty_order, const PirlsOptions& opts) {
  if (!dataset.responses) throw std::invalid_argument("fitFull: dataset has no responses");
  if (dataset.sampleCount() < 1) throw std::invalid_argument("fitFull: empty dataset");
  const DesignMatrix design = computeScores(dataset, basis);
  const PenaltyMatrix penalty = penaltyMatrix(*basis, penalty_order);
  FittedModel model = fitPirls(design.scores, *dataset.responses, tau, lambda, penalty.matrix,
                               nullptr, opts);
  model.basis = std::move(basis);
  return model;
}

FittedModel fitSubsample(const DesignMatrix& design, const Eigen::VectorXd& y, double tau,
                         double lambda, const PenaltyMatrix& penalty,
                         const SubsamplePlan& plan, const PirlsOptions& opts) {
  const Eigen::Index n_sel = static_cast<Eigen::Index>(plan.indices.size());
  if (n_sel < 1) throw std::invalid_argument("fitSubsample: empty plan");
  Eigen::MatrixXd sub(n_sel, design.scores.cols());
  Eigen::VectorXd sub_y(n_sel), cw(n_sel);
  for (Eigen::Index j = 0; j < n_sel; ++j) {
    const int i = plan.indices[j];
    if (i < 0 || i >= design.scores.rows()) {
      throw std::invalid_argument("fitSubsample: plan index out of range");
    }
    sub.row(j) = design.scores.row(i);
    sub_y[j] = y[i];
    cw[j] = double(plan.counts[j]) / (double(plan.draws) * plan.probs[i]);
  }
  FittedModel model = fitPirls(sub, sub_y, tau, lambda, penalty.matrix, &cw, opts);
  model.basis = design.basis;
  return model;
}

Eigen::VectorXd predict(const FittedModel& model, const DesignMatrix& design) {
  return design.scores * model.theta;
}

Eigen::VectorXd evalBeta(const FittedModel& model, const BSplineBasis& basis,
                         const Eigen::VectorXd& t_grid) {
  return basis.evaluateMany(t_grid) * model.theta;
}

}  // namespace fqr
