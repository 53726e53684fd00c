#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "fqr/design.hpp"

namespace fqr {

enum class SamplingMethod { Unif, FLopt, FAopt };

const char* samplingMethodName(SamplingMethod method);

/// Result of drawing r with-replacement subsamples: full probability vector,
/// the distinct selected indices with their multiplicities, and the seed that
/// produced them. Immutable after construction.
struct SubsamplePlan {
  SamplingMethod method = SamplingMethod::Unif;
  Eigen::VectorXd probs;       // length n, on the simplex
  std::vector<int> indices;    // distinct selected rows
  std::vector<int> counts;     // multiplicities R_i, same length as indices
  int draws = 0;               // r = sum of counts
  std::uint64_t seed = 0;
};

Eigen::VectorXd probUniform(Eigen::Index n);

/// pi_i proportional to ||B_i||_2 (L-optimal). Zero-norm rows get the
/// 1e-12/n floor before renormalization so inverse weights stay finite.
Eigen::VectorXd probFlopt(const DesignMatrix& design);

/// pi_i proportional to ||H_tau^{-1} B_i||_2 (A-optimal). One factorization
/// of H_tau, then n triangular solves. Rejects condition numbers above 1e12.
Eigen::VectorXd probFaopt(const DesignMatrix& design, const Eigen::MatrixXd& H_tau);

/// Gaussian-kernel density estimate at zero with Silverman bandwidth,
/// floored at 1e-6. Requires at least 30 residuals.
double estimateDensityAtZero(const Eigen::VectorXd& residuals);

/// Practical A-optimal pipeline: uniform pilot of size pilot_size, pilot
/// fit, residual density at zero, H_tau = f(0) G + (lambda/n) D_q, then
/// probFaopt. Deterministic given the seed. pilot_size must be >= 200.
Eigen::VectorXd faoptPipeline(const DesignMatrix& design, const Eigen::VectorXd& y,
                              double tau, double lambda, const PenaltyMatrix& penalty,
                              int pilot_size, std::uint64_t seed);

/// Walker/Vose alias table: O(n) build, O(1) per draw.
class AliasTable {
 public:
  explicit AliasTable(const Eigen::VectorXd& probs);
  int draw(std::uint64_t& state) const;  // splitmix64 stream

 private:
  std::vector<double> threshold_;
  std::vector<int> alias_;
};

/// r i.i.d. categorical draws aggregated into a plan (multinomial(r, pi)).
SubsamplePlan drawWithReplacement(const Eigen::VectorXd& probs, int r, std::uint64_t seed,
                                  SamplingMethod method = SamplingMethod::Unif);

}  // namespace fqr
