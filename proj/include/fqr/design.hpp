#pragma once

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fqr/basis.hpp"

namespace fqr {

/// Curves discretized on a common grid in [0,1], optionally with scalar
/// responses. Row i of `curves` is x_i sampled on `grid`.
struct FunctionalDataset {
  Eigen::VectorXd grid;
  Eigen::MatrixXd curves;
  std::optional<Eigen::VectorXd> responses;
  std::vector<std::string> ids;  // optional, used by the CSV round trip

  Eigen::Index sampleCount() const { return curves.rows(); }
  Eigen::Index gridSize() const { return grid.size(); }

  /// Throws std::invalid_argument when the grid is not strictly increasing
  /// in [0,1], curves/grid sizes disagree, or responses have wrong length.
  void validate() const;
};

/// n x d matrix of functional scores B_i = integral of x_i(t) B(t) dt.
struct DesignMatrix {
  Eigen::MatrixXd scores;
  std::shared_ptr<const BSplineBasis> basis;
};

/// Composite-trapezoid weights for a strictly increasing grid.
Eigen::VectorXd trapezoidWeights(const Eigen::VectorXd& grid);

/// Scores by composite trapezoid on the observation grid.
DesignMatrix computeScores(const FunctionalDataset& dataset,
                           std::shared_ptr<const BSplineBasis> basis);

/// G = (1/n) scores^T scores.
Eigen::MatrixXd gramG(const DesignMatrix& design);

/// G_tau = (1/n) sum_i densities[i] B_i B_i^T; densities must be positive.
Eigen::MatrixXd gramGtau(const DesignMatrix& design, const Eigen::VectorXd& densities);

/// H_tau = G_tau + (lambda/n) D_q.
Eigen::MatrixXd assembleHtau(const Eigen::MatrixXd& G_tau, double lambda, Eigen::Index n,
                             const PenaltyMatrix& penalty);

/// One irregular raw record (e.g. hourly readings for one day).
struct RawRecord {
  std::string id;
  std::vector<double> times;
  std::vector<double> values;
};

struct SmoothingSummary {
  Eigen::Index accepted = 0;
  std::vector<std::string> rejected_ids;
};

/// Least-squares Fourier smoothing of raw records onto a common grid.
/// n_basis must be odd (constant plus sine/cosine pairs); records with fewer
/// observations than coefficients are rejected and reported in the summary.
/// Each record's time axis is affinely rescaled to [0,1].
FunctionalDataset smoothCurvesFourier(const std::vector<RawRecord>& records, int n_basis,
                                      const Eigen::VectorXd& grid,
                                      SmoothingSummary* summary = nullptr);

}  // namespace fqr
