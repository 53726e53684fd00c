#pragma once

#include <Eigen/Core>

#include <vector>

namespace fqr {

/// Normalized B-spline basis on [0,1] with K equispaced interior knots and
/// p+1-fold repeated boundary knots. Dimension is K+p+1. Immutable after
/// construction; all evaluation methods are pure.
class BSplineBasis {
 public:
  /// interior_knots >= 1, degree >= 0; throws std::invalid_argument otherwise.
  BSplineBasis(int interior_knots, int degree);

  int degree() const { return degree_; }
  int interiorKnots() const { return interior_; }
  int dimension() const { return interior_ + degree_ + 1; }
  const std::vector<double>& knots() const { return knots_; }

  /// Values of all basis functions at t in [0,1]. Non-negative, sum to 1,
  /// at most p+1 nonzeros. Right-continuous at interior knots.
  Eigen::VectorXd evaluate(double t) const;

  /// order-th derivative of all basis functions at t (right limit at knots).
  /// order = 0 reproduces evaluate(). Requires 0 <= order <= degree.
  Eigen::VectorXd derivative(double t, int order) const;

  /// Rows of basis values for a vector of evaluation points.
  Eigen::MatrixXd evaluateMany(const Eigen::VectorXd& ts) const;

 private:
  int degree_;
  int interior_;
  std::vector<double> knots_;
};

/// Exact roughness penalty D_q = integral of B^(q) (B^(q))^T over [0,1],
/// computed by Gauss-Legendre quadrature per sub-interval (exact for the
/// piecewise-polynomial integrand). Symmetric PSD with rank deficiency q.
struct PenaltyMatrix {
  int order = 0;
  Eigen::MatrixXd matrix;
};

PenaltyMatrix penaltyMatrix(const BSplineBasis& basis, int order);

/// Gauss-Legendre nodes/weights on [-1,1], n in [1, 32].
void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fqr
