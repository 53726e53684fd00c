#include "fqr/sampling.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fqr/rng.hpp"
#include "fqr/solver.hpp"

namespace fqr {

const char* samplingMethodName(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::Unif: return "Unif";
    case SamplingMethod::FLopt: return "FLopt";
    case SamplingMethod::FAopt: return "FAopt";
  }
  return "?";
}

Eigen::VectorXd probUniform(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("probUniform: n must be >= 1");
  return Eigen::VectorXd::Constant(n, 1.0 / double(n));
}

namespace {

Eigen::VectorXd normalizeWithFloor(Eigen::VectorXd weights) {
  const Eigen::Index n = weights.size();
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::invalid_argument("sampling: all-zero weight vector");
  const double floor = 1e-12 / double(n) * total;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights[i] < floor) weights[i] = floor;
  }
  return weights / weights.sum();
}

}  // namespace

Eigen::VectorXd probFlopt(const DesignMatrix& design) {
  if (design.scores.rows() < 1) throw std::invalid_argument("probFlopt: empty design");
  return normalizeWithFloor(design.scores.rowwise().norm());
}

Eigen::VectorXd probFaopt(const DesignMatrix& design, const Eigen::MatrixXd& H_tau) {
  const Eigen::Index n = design.scores.rows();
  if (n < 1) throw std::invalid_argument("probFaopt: empty design");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H_tau);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("probFaopt: H_tau factorization failed");
  }
  const Eigen::VectorXd diag = ldlt.vectorD();
  const double dmin = diag.minCoeff();
  const double dmax = diag.maxCoeff();
  if (!(dmin > 0.0) || dmax / dmin > 1e12) {
    throw std::runtime_error("probFaopt: H_tau ill-conditioned (estimate " +
                             std::to_string(dmin > 0.0 ? dmax / dmin : INFINITY) + ")");
  }
  // One factorization, one d x d inverse, then a single n x d product:
  // O(n d^2) with matrix-matrix efficiency instead of n separate solves.
  const Eigen::Index d = H_tau.rows();
  const Eigen::MatrixXd H_inv = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd transformed = design.scores * H_inv;  // n x d
  return normalizeWithFloor(transformed.rowwise().norm());
}

double estimateDensityAtZero(const Eigen::VectorXd& residuals) {
  const Eigen::Index m = residuals.size();
  if (m < 30) throw std::invalid_argument("estimateDensityAtZero: need at least 30 residuals");
  const double mean = residuals.mean();
  const double sd = std::sqrt((residuals.array() - mean).square().sum() / double(m - 1));
  std::vector<double> sorted(residuals.data(), residuals.data() + m);
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * double(m - 1);
    const Eigen::Index lo = static_cast<Eigen::Index>(pos);
    const double frac = pos - double(lo);
    return lo + 1 < m ? sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac : sorted[lo];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, 1e-12);
  const double h = std::max(1.06 * spread * std::pow(double(m), -0.2), 1e-12);
  double density = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double z = residuals[i] / h;
    density += std::exp(-0.5 * z * z);
  }
  density /= double(m) * h * std::sqrt(2.0 * M_PI);
  return std::max(density, 1e-6);
}

Eigen::VectorXd faoptPipeline(const DesignMatrix& design, const Eigen::VectorXd& y,
                              double tau, double lambda, const PenaltyMatrix& penalty,
                              int pilot_size, std::uint64_t seed) {
  const Eigen::Index n = design.scores.rows();
  if (pilot_size < 200) throw std::invalid_argument("faoptPipeline: pilot size must be >= 200");
  if (y.size() != n) throw std::invalid_argument("faoptPipeline: response length mismatch");

  const SubsamplePlan pilot = drawWithReplacement(probUniform(n), pilot_size,
                                                  mixSeed(seed, 0x70696c6f74ULL),
                                                  SamplingMethod::Unif);
  const FittedModel pilot_fit = fitSubsample(design, y, tau, lambda, penalty, pilot);

  Eigen::VectorXd residuals(static_cast<Eigen::Index>(pilot.indices.size()));
  for (size_t j = 0; j < pilot.indices.size(); ++j) {
    const int i = pilot.indices[j];
    residuals[static_cast<Eigen::Index>(j)] =
        y[i] - design.scores.row(i).dot(pilot_fit.theta);
  }
  const double f0 = estimateDensityAtZero(residuals);
  const Eigen::MatrixXd H_tau = assembleHtau(f0 * gramG(design), lambda, n, penalty);
  return probFaopt(design, H_tau);
}

AliasTable::AliasTable(const Eigen::VectorXd& probs) {
  const Eigen::Index n = probs.size();
  if (n < 1) throw std::invalid_argument("AliasTable: empty probability vector");
  if (!probs.allFinite() || !(probs.minCoeff() > 0.0) || std::abs(probs.sum() - 1.0) > 1e-8) {
    throw std::invalid_argument("AliasTable: invalid probability vector");
  }
  threshold_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<int> small, large;
  small.reserve(n);
  large.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scaled[i] = probs[i] * double(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
  }
  while (!small.empty() && !large.empty()) {
    const int s = small.back();
    const int l = large.back();
    small.pop_back();
    large.pop_back();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = scaled[l] + scaled[s] - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (int i : large) threshold_[i] = 1.0;
  for (int i : small) threshold_[i] = 1.0;
}

int AliasTable::draw(std::uint64_t& state) const {
  const std::uint64_t bits = mixSeed(state++);
  const double u = double(bits >> 11) * 0x1.0p-53;
  const double scaled = u * double(threshold_.size());
  int idx = static_cast<int>(scaled);
  if (idx >= static_cast<int>(threshold_.size())) idx = static_cast<int>(threshold_.size()) - 1;
  const double frac = scaled - double(idx);
  return frac < threshold_[idx] ? idx : alias_[idx];
}

SubsamplePlan drawWithReplacement(const Eigen::VectorXd& probs, int r, std::uint64_t seed,
                                  SamplingMethod method) {
  if (r < 1) throw std::invalid_argument("drawWithReplacement: r must be >= 1");
  const AliasTable table(probs);
  const Eigen::Index n = probs.size();
  std::vector<int> counts(n, 0);
  std::uint64_t state = mixSeed(seed, 0x647261777351ULL);
  for (int k = 0; k < r; ++k) ++counts[table.draw(state)];

  SubsamplePlan plan;
  plan.method = method;
  plan.probs = probs;
  plan.draws = r;
  plan.seed = seed;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (counts[i] > 0) {
      plan.indices.push_back(static_cast<int>(i));
      plan.counts.push_back(counts[i]);
    }
  }
  return plan;
}

}  // namespace fqr
