#include "fqr/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace fqr {

BSplineBasis::BSplineBasis(int interior_knots, int degree)
    : degree_(degree), interior_(interior_knots) {
  if (interior_knots < 1) {
    throw std::invalid_argument("BSplineBasis: interior knot count must be >= 1");
  }
  if (degree < 0) {
    throw std::invalid_argument("BSplineBasis: degree must be >= 0");
  }
  const int p = degree;
  const int K = interior_knots;
  knots_.reserve(K + 2 * (p + 1));
  for (int j = 0; j <= p; ++j) knots_.push_back(0.0);
  for (int j = 1; j <= K; ++j) knots_.push_back(double(j) / double(K + 1));
  for (int j = 0; j <= p; ++j) knots_.push_back(1.0);
}

namespace {

// Dense Cox-de Boor table up to the requested degree, then the difference
// recursion for derivatives. Sizes are small (dimension <= a few hundred),
// so the O(d*p) dense sweep is fine.
Eigen::VectorXd evalAll(const std::vector<double>& knots, int p, int order, double t) {
  const int n_knots = static_cast<int>(knots.size());
  // Zero-degree indicators, right-continuous; the last nonempty span is
  // closed at t = 1 so the basis still sums to 1 at the right endpoint.
  std::vector<double> vals(n_knots - 1, 0.0);
  for (int k = 0; k + 1 < n_knots; ++k) {
    const bool last_span = knots[k] < knots[k + 1] && knots[k + 1] == knots.back();
    if ((t >= knots[k] && t < knots[k + 1]) ||
        (last_span && t >= knots[k] && t <= knots[k + 1])) {
      vals[k] = 1.0;
      break;
    }
  }
  const int base_degree = p - order;
  for (int deg = 1; deg <= base_degree; ++deg) {
    for (int k = 0; k + deg + 1 < n_knots; ++k) {
      double v = 0.0;
      const double dl = knots[k + deg] - knots[k];
      const double dr = knots[k + deg + 1] - knots[k + 1];
      if (dl > 0.0) v += (t - knots[k]) / dl * vals[k];
      if (dr > 0.0) v += (knots[k + deg + 1] - t) / dr * vals[k + 1];
      vals[k] = v;
    }
  }
  // Raise the degree back up while differentiating once per level.
  for (int deg = base_degree + 1; deg <= p; ++deg) {
    for (int k = 0; k + deg + 1 < n_knots; ++k) {
      double v = 0.0;
      const double dl = knots[k + deg] - knots[k];
      const double dr = knots[k + deg + 1] - knots[k + 1];
      if (dl > 0.0) v += vals[k] / dl;
      if (dr > 0.0) v -= vals[k + 1] / dr;
      vals[k] = deg * v;
    }
  }
  const int dim = n_knots - p - 1;
  Eigen::VectorXd out(dim);
  for (int k = 0; k < dim; ++k) out[k] = vals[k];
  return out;
}

}  // namespace

Eigen::VectorXd BSplineBasis::evaluate(double t) const {
  return derivative(t, 0);
}

Eigen::VectorXd BSplineBasis::derivative(double t, int order) const {
  if (t < 0.0 || t > 1.0) {
    throw std::domain_error("BSplineBasis: evaluation point outside [0,1]");
  }
  if (order < 0 || order > degree_) {
    throw std::domain_error("BSplineBasis: derivative order outside [0, degree]");
  }
  return evalAll(knots_, degree_, order, t);
}

Eigen::MatrixXd BSplineBasis::evaluateMany(const Eigen::VectorXd& ts) const {
  Eigen::MatrixXd out(ts.size(), dimension());
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    out.row(i) = evaluate(ts[i]).transpose();
  }
  return out;
}

void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1 || n > 32) {
    throw std::invalid_argument("gaussLegendre: node count out of range");
  }
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

PenaltyMatrix penaltyMatrix(const BSplineBasis& basis, int order) {
  const int p = basis.degree();
  if (order < 0 || order > p) {
    throw std::domain_error("penaltyMatrix: order outside [0, degree]");
  }
  const int d = basis.dimension();
  const int K = basis.interiorKnots();
  const int n_nodes = p - order + 1;  // exact for degree 2(p - order)
  std::vector<double> gx, gw;
  gaussLegendre(n_nodes, gx, gw);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j <= K; ++j) {
    const double a = double(j) / double(K + 1);
    const double b = double(j + 1) / double(K + 1);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int g = 0; g < n_nodes; ++g) {
      const double t = mid + half * gx[g];
      const Eigen::VectorXd v = basis.derivative(t, order);
      D.selfadjointView<Eigen::Lower>().rankUpdate(v, half * gw[g]);
    }
  }
  PenaltyMatrix out;
  out.order = order;
  out.matrix = D.selfadjointView<Eigen::Lower>();
  return out;
}

}  // namespace fqr
