#include "fqr/simulate.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fqr/rng.hpp"

namespace fqr {

CoefficientDist coefficientDistFromName(const std::string& name) {
  if (name == "mvNormal") return CoefficientDist::MvNormal;
  if (name == "mvT3") return CoefficientDist::MvT3;
  if (name == "mvT2") return CoefficientDist::MvT2;
  throw std::invalid_argument("unknown coefficient distribution: " + name);
}

ErrorDist errorDistFromName(const std::string& name) {
  if (name == "Normal") return ErrorDist::Normal;
  if (name == "T1") return ErrorDist::T1;
  if (name == "Hetero") return ErrorDist::Hetero;
  throw std::invalid_argument("unknown error distribution: " + name);
}

const char* coefficientDistName(CoefficientDist dist) {
  switch (dist) {
    case CoefficientDist::MvNormal: return "mvNormal";
    case CoefficientDist::MvT3: return "mvT3";
    case CoefficientDist::MvT2: return "mvT2";
  }
  return "?";
}

const char* errorDistName(ErrorDist dist) {
  switch (dist) {
    case ErrorDist::Normal: return "Normal";
    case ErrorDist::T1: return "T1";
    case ErrorDist::Hetero: return "Hetero";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (n < 1) throw std::invalid_argument("SimulationConfig: n must be >= 1");
  if (m_test < 0) throw std::invalid_argument("SimulationConfig: m_test must be >= 0");
  // The generator builds its curves from a B-spline basis with at least one
  // interior knot, which needs 5 or more cubic basis functions.
  if (generator_basis_size < 5) {
    throw std::invalid_argument("SimulationConfig: generator_basis_size must be >= 5");
  }
  if (grid_size < 2) throw std::invalid_argument("SimulationConfig: grid_size must be >= 2");
  if (noise_scale < 0.0) throw std::invalid_argument("SimulationConfig: noise_scale must be >= 0");
}

namespace {

Eigen::VectorXd uniformGrid(Eigen::Index m) {
  Eigen::VectorXd grid(m);
  for (Eigen::Index j = 0; j < m; ++j) grid[j] = double(j) / double(m - 1);
  return grid;
}

double tDegrees(CoefficientDist dist) {
  switch (dist) {
    case CoefficientDist::MvT3: return 3.0;
    case CoefficientDist::MvT2: return 2.0;
    default: return 0.0;
  }
}

}  // namespace

FunctionalDataset genCovariates(const SimulationConfig& config) {
  config.validate();
  const int J = config.generator_basis_size;
  const BSplineBasis gen_basis(J - 4, 3);

  // Sigma_ij = 0.5^|i-j|, factored once.
  Eigen::MatrixXd sigma(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j) sigma(i, j) = std::pow(0.5, std::abs(i - j));
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

  FunctionalDataset out;
  out.grid = uniformGrid(config.grid_size);
  const Eigen::MatrixXd basis_vals = gen_basis.evaluateMany(out.grid);  // m x J
  out.curves.resize(config.n, config.grid_size);

  const double nu = tDegrees(config.coefficient_dist);
  for (Eigen::Index i = 0; i < config.n; ++i) {
    RngEngine rng(mixSeed(config.seed, 0x636f76ULL, std::uint64_t(i)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(J);
    for (int j = 0; j < J; ++j) z[j] = gauss(rng);
    Eigen::VectorXd coef = chol * z;
    if (nu > 0.0) {
      std::chi_squared_distribution<double> chi2(nu);
      coef /= std::sqrt(chi2(rng) / nu);
    }
    out.curves.row(i) = (basis_vals * coef).transpose();
  }
  return out;
}

Eigen::VectorXd trueBeta(const Eigen::VectorXd& t) {
  return 2.0 * t.array().square() + 0.25 * t.array() + 1.0;
}

Eigen::VectorXd genResponses(const FunctionalDataset& dataset, ErrorDist error_dist,
                             std::uint64_t seed, double noise_scale) {
  dataset.validate();
  const Eigen::Index n = dataset.sampleCount();
  const Eigen::VectorXd w = trapezoidWeights(dataset.grid);
  const Eigen::VectorXd beta = trueBeta(dataset.grid);
  const Eigen::VectorXd signal = dataset.curves * w.cwiseProduct(beta);

  // Hetero scale: trapezoid of |x_i(t) (t+1)|.
  Eigen::VectorXd hetero_scale;
  if (error_dist == ErrorDist::Hetero) {
    const Eigen::VectorXd t_plus_1 = dataset.grid.array() + 1.0;
    hetero_scale = (dataset.curves.array().rowwise() * t_plus_1.transpose().array())
                       .abs()
                       .matrix() *
                   w;
  }

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    RngEngine rng(mixSeed(seed, 0x657272ULL, std::uint64_t(i)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double eps = 0.0;
    switch (error_dist) {
      case ErrorDist::Normal:
        eps = gauss(rng);
        break;
      case ErrorDist::T1: {
        std::cauchy_distribution<double> cauchy(0.0, 1.0);
        eps = cauchy(rng);
        break;
      }
      case ErrorDist::Hetero:
        eps = gauss(rng) * hetero_scale[i];
        break;
    }
    y[i] = signal[i] + noise_scale * eps;
  }
  return y;
}

}  // namespace fqr
