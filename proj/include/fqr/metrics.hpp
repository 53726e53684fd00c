#pragma once

#include <Eigen/Core>

#include <chrono>
#include <vector>

#include "fqr/design.hpp"

namespace fqr {

/// Mean over repetitions of the root integrated squared error against the
/// truth curve; trapezoid integration on the shared evaluation grid.
double imse(const std::vector<Eigen::VectorXd>& estimates, const Eigen::VectorXd& truth,
            const Eigen::VectorXd& grid);

/// Same computation with the full-data estimate as the reference.
double eimse(const std::vector<Eigen::VectorXd>& estimates,
             const Eigen::VectorXd& full_data_estimate, const Eigen::VectorXd& grid);

/// PE = sum_i (int x_i beta - int x_i beta_sub)^2 / sum_i (int x_i beta - int x_i beta_full)^2
/// over the test set; all integrals by trapezoid on the test grid.
double predictionEfficiency(const FunctionalDataset& test, const Eigen::VectorXd& beta_sub,
                            const Eigen::VectorXd& beta_full, const Eigen::VectorXd& beta_true);

/// RE = sum_i (int x_i beta_sub - int x_i beta_full)^2 / sum_i (int x_i beta_full)^2.
double relativeEfficiency(const FunctionalDataset& test, const Eigen::VectorXd& beta_sub,
                          const Eigen::VectorXd& beta_full);

/// V_pi = (1/n^2) sum_i B_i B_i^T / pi_i.
Eigen::MatrixXd samplingVariance(const DesignMatrix& design, const Eigen::VectorXd& probs);

/// V = tau(1-tau)/K * H_tau^{-1} (V_pi + (r/n) G) H_tau^{-1}.
Eigen::MatrixXd asymptoticVariance(const DesignMatrix& design, const Eigen::VectorXd& probs,
                                   const Eigen::MatrixXd& H_tau, int r, Eigen::Index n,
                                   double tau);

/// Monotonic wall-clock stopwatch.
class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  void reset() { start_ = clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

}  // namespace fqr
