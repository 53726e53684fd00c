#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "fqr/design.hpp"

namespace fqr {

enum class CoefficientDist { MvNormal, MvT3, MvT2 };
enum class ErrorDist { Normal, T1, Hetero };

CoefficientDist coefficientDistFromName(const std::string& name);
ErrorDist errorDistFromName(const std::string& name);
const char* coefficientDistName(CoefficientDist dist);
const char* errorDistName(ErrorDist dist);

/// Synthetic data generator settings. Curves are random combinations of
/// cubic B-splines with AR(1)-correlated coefficients (Sigma_ij = 0.5^|i-j|)
/// drawn mvNormal / mvT3 / mvT2; responses are a quadratic slope signal plus
/// Normal, Cauchy, or heteroscedastic noise.
struct SimulationConfig {
  Eigen::Index n = 1000;
  Eigen::Index m_test = 1000;
  CoefficientDist coefficient_dist = CoefficientDist::MvNormal;
  ErrorDist error_dist = ErrorDist::Normal;
  int generator_basis_size = 10;  // number of cubic B-splines building the curves
  Eigen::Index grid_size = 100;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // test hook; 0 gives noiseless responses

  void validate() const;
};

/// Curves only (no responses). Per-observation seed streams: the same seed
/// produces the same dataset regardless of generation order or threading.
FunctionalDataset genCovariates(const SimulationConfig& config);

/// The fixed simulation truth 2t^2 + 0.25t + 1, evaluated pointwise.
Eigen::VectorXd trueBeta(const Eigen::VectorXd& t);

/// y_i = trapezoid(x_i * beta) + noise_scale * eps_i.
Eigen::VectorXd genResponses(const FunctionalDataset& dataset, ErrorDist error_dist,
                             std::uint64_t seed, double noise_scale = 1.0);

}  // namespace fqr
