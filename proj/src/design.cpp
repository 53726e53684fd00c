#include "fqr/design.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace fqr {

void FunctionalDataset::validate() const {
  if (grid.size() < 2) {
    throw std::invalid_argument("FunctionalDataset: grid needs at least 2 points");
  }
  if (grid[0] < 0.0 || grid[grid.size() - 1] > 1.0) {
    throw std::invalid_argument("FunctionalDataset: grid must lie in [0,1]");
  }
  for (Eigen::Index j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) {
      throw std::invalid_argument("FunctionalDataset: grid must be strictly increasing");
    }
  }
  if (curves.cols() != grid.size()) {
    throw std::invalid_argument("FunctionalDataset: curve columns must match grid length");
  }
  if (!curves.allFinite()) {
    throw std::invalid_argument("FunctionalDataset: curves contain non-finite values");
  }
  if (responses && responses->size() != curves.rows()) {
    throw std::invalid_argument("FunctionalDataset: response length must match curve count");
  }
}

Eigen::VectorXd trapezoidWeights(const Eigen::VectorXd& grid) {
  const Eigen::Index m = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    const double h = 0.5 * (grid[j + 1] - grid[j]);
    w[j] += h;
    w[j + 1] += h;
  }
  return w;
}

DesignMatrix computeScores(const FunctionalDataset& dataset,
                           std::shared_ptr<const BSplineBasis> basis) {
  dataset.validate();
  const Eigen::VectorXd w = trapezoidWeights(dataset.grid);
  Eigen::MatrixXd basis_vals = basis->evaluateMany(dataset.grid);  // m x d
  basis_vals.array().colwise() *= w.array();
  DesignMatrix design;
  design.scores = dataset.curves * basis_vals;
  design.basis = std::move(basis);
  return design;
}

Eigen::MatrixXd gramG(const DesignMatrix& design) {
  const Eigen::Index n = design.scores.rows();
  if (n < 1) throw std::invalid_argument("gramG: empty design");
  const Eigen::Index d = design.scores.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  G.selfadjointView<Eigen::Lower>().rankUpdate(design.scores.transpose(), 1.0 / double(n));
  return G.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd gramGtau(const DesignMatrix& design, const Eigen::VectorXd& densities) {
  const Eigen::Index n = design.scores.rows();
  if (n < 1) throw std::invalid_argument("gramGtau: empty design");
  if (densities.size() != n) throw std::invalid_argument("gramGtau: density length mismatch");
  if (!(densities.minCoeff() > 0.0) || !densities.allFinite()) {
    throw std::domain_error("gramGtau: densities must be strictly positive and finite");
  }
  Eigen::MatrixXd scaled = design.scores;
  scaled.array().colwise() *= densities.array().sqrt();
  const Eigen::Index d = design.scores.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  G.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), 1.0 / double(n));
  return G.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd assembleHtau(const Eigen::MatrixXd& G_tau, double lambda, Eigen::Index n,
                             const PenaltyMatrix& penalty) {
  if (lambda < 0.0) throw std::invalid_argument("assembleHtau: lambda must be >= 0");
  if (n < 1) throw std::invalid_argument("assembleHtau: n must be >= 1");
  if (G_tau.rows() != penalty.matrix.rows() || G_tau.cols() != penalty.matrix.cols()) {
    throw std::invalid_argument("assembleHtau: dimension mismatch");
  }
  return G_tau + (lambda / double(n)) * penalty.matrix;
}

FunctionalDataset smoothCurvesFourier(const std::vector<RawRecord>& records, int n_basis,
                                      const Eigen::VectorXd& grid,
                                      SmoothingSummary* summary) {
  if (n_basis < 1 || n_basis % 2 == 0) {
    throw std::invalid_argument("smoothCurvesFourier: n_basis must be odd and positive");
  }
  const int pairs = (n_basis - 1) / 2;
  const Eigen::Index m = grid.size();

  auto fourierRow = [&](double t) {
    Eigen::VectorXd row(n_basis);
    row[0] = 1.0;
    for (int k = 1; k <= pairs; ++k) {
      row[2 * k - 1] = std::sin(2.0 * M_PI * k * t);
      row[2 * k] = std::cos(2.0 * M_PI * k * t);
    }
    return row;
  };

  Eigen::MatrixXd grid_basis(m, n_basis);
  for (Eigen::Index j = 0; j < m; ++j) grid_basis.row(j) = fourierRow(grid[j]).transpose();

  std::vector<Eigen::VectorXd> rows;
  std::vector<std::string> kept_ids;
  SmoothingSummary local;
  for (const auto& rec : records) {
    const int n_obs = static_cast<int>(rec.times.size());
    if (n_obs < n_basis || rec.values.size() != rec.times.size()) {
      local.rejected_ids.push_back(rec.id);
      continue;
    }
    const double t0 = *std::min_element(rec.times.begin(), rec.times.end());
    const double t1 = *std::max_element(rec.times.begin(), rec.times.end());
    const double span = t1 > t0 ? t1 - t0 : 1.0;
    Eigen::MatrixXd X(n_obs, n_basis);
    Eigen::VectorXd v(n_obs);
    for (int i = 0; i < n_obs; ++i) {
      X.row(i) = fourierRow((rec.times[i] - t0) / span).transpose();
      v[i] = rec.values[i];
    }
    Eigen::MatrixXd A = X.transpose() * X;
    A.diagonal().array() += 1e-10;  // rank-deficiency guard
    const Eigen::VectorXd coef = A.ldlt().solve(X.transpose() * v);
    rows.push_back(grid_basis * coef);
    kept_ids.push_back(rec.id);
    ++local.accepted;
  }

  FunctionalDataset out;
  out.grid = grid;
  out.curves.resize(static_cast<Eigen::Index>(rows.size()), m);
  for (size_t i = 0; i < rows.size(); ++i) out.curves.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  out.ids = std::move(kept_ids);
  if (summary) *summary = std::move(local);
  return out;
}

}  // namespace fqr
