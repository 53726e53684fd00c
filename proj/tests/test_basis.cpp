#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "fqr/basis.hpp"

using namespace fqr;

TEST_CASE("make_basis: knots and dimension") {
  const BSplineBasis b(1, 1);
  CHECK(b.dimension() == 3);
  const std::vector<double> expected{0.0, 0.0, 0.5, 1.0, 1.0};
  REQUIRE(b.knots().size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) CHECK(b.knots()[i] == doctest::Approx(expected[i]));

  CHECK(BSplineBasis(31, 3).dimension() == 35);
  CHECK(BSplineBasis(18, 3).dimension() == 22);
  CHECK_THROWS_AS(BSplineBasis(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(BSplineBasis(4, -1), std::invalid_argument);
}

TEST_CASE("eval_basis: boundary and knot values for degree-1 hats") {
  const BSplineBasis b(1, 1);
  Eigen::VectorXd v = b.evaluate(0.0);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK(v[2] == doctest::Approx(0.0));
  v = b.evaluate(0.5);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(0.0));
  v = b.evaluate(1.0);
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(b.evaluate(-0.1), std::domain_error);
  CHECK_THROWS_AS(b.evaluate(1.1), std::domain_error);
}

TEST_CASE("eval_basis: partition of unity and support count") {
  const BSplineBasis b(4, 3);
  const Eigen::VectorXd v = b.evaluate(0.37);
  CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
  CHECK((v.array() >= 0.0).all());
  CHECK((v.array() > 0.0).count() == 4);
}

TEST_CASE("partition of unity over 1000 points, several bases") {
  for (auto [K, p] : {std::pair{1, 1}, {4, 3}, {10, 2}, {31, 3}}) {
    const BSplineBasis b(K, p);
    for (int i = 0; i < 1000; ++i) {
      const double t = double(i) / 999.0;
      const Eigen::VectorXd v = b.evaluate(t);
      CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
      CHECK((v.array() >= -1e-15).all());
      CHECK((v.array() > 0.0).count() <= p + 1);
    }
  }
}

TEST_CASE("local support matches knot spans") {
  const BSplineBasis b(5, 3);
  const auto& knots = b.knots();
  const int p = b.degree();
  for (int i = 0; i < 200; ++i) {
    const double t = (i + 0.5) / 200.0;
    const Eigen::VectorXd v = b.evaluate(t);
    for (int k = 0; k < b.dimension(); ++k) {
      const bool inside = t >= knots[k] && t < knots[k + p + 1];
      if (!inside) CHECK(v[k] == 0.0);
    }
  }
}

TEST_CASE("eval_basis_deriv: q=0 equals evaluate; hat derivatives") {
  const BSplineBasis b(1, 1);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK((b.derivative(t, 0) - b.evaluate(t)).cwiseAbs().maxCoeff() == 0.0);
  }
  Eigen::VectorXd d = b.derivative(0.25, 1);
  CHECK(d[0] == doctest::Approx(-2.0));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == doctest::Approx(0.0));
  d = b.derivative(0.75, 1);
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(-2.0));
  CHECK(d[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(b.derivative(0.5, 2), std::domain_error);
}

TEST_CASE("derivative consistency with finite differences") {
  const BSplineBasis b(6, 3);
  const double h = 1e-6;
  for (double t : {0.13, 0.41, 0.77}) {
    const Eigen::VectorXd fd = (b.evaluate(t + h) - b.evaluate(t - h)) / (2.0 * h);
    const Eigen::VectorXd an = b.derivative(t, 1);
    CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("penalty golden matrix (K=1, p=1, q=1)") {
  const PenaltyMatrix D = penaltyMatrix(BSplineBasis(1, 1), 1);
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((D.matrix - expected).cwiseAbs().maxCoeff() <= 1e-12);
  // Constants lie in the null space of the first-derivative penalty.
  CHECK((D.matrix * Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("penalty at q=0 is the Gram matrix; total mass 1") {
  for (auto [K, p] : {std::pair{3, 2}, {5, 3}}) {
    const PenaltyMatrix G = penaltyMatrix(BSplineBasis(K, p), 0);
    CHECK(G.matrix.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((G.matrix - G.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("penalty symmetry, PSD, and rank deficiency q") {
  for (auto [K, p, q] : {std::tuple{4, 3, 2}, {6, 2, 1}, {3, 3, 3}}) {
    const PenaltyMatrix D = penaltyMatrix(BSplineBasis(K, p), q);
    CHECK((D.matrix - D.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.matrix);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    const double scale = es.eigenvalues().maxCoeff();
    int null_dim = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] < 1e-9 * scale) ++null_dim;
    }
    CHECK(null_dim == q);
  }
}

TEST_CASE("polynomials of degree < q lie in the penalty null space") {
  // Coefficients reproducing t^j come from interpolating the polynomial in
  // the spline space (exact since degree <= p).
  for (auto [p, q] : {std::pair{3, 2}, {2, 1}}) {
    const BSplineBasis basis(6, p);
    const int d = basis.dimension();
    Eigen::MatrixXd collocation(d, d);
    Eigen::VectorXd ts(d);
    for (int i = 0; i < d; ++i) {
      ts[i] = double(i) / double(d - 1);
      collocation.row(i) = basis.evaluate(ts[i]).transpose();
    }
    const PenaltyMatrix D = penaltyMatrix(basis, q);
    for (int deg = 0; deg < q; ++deg) {
      const Eigen::VectorXd vals = ts.array().pow(double(deg));
      const Eigen::VectorXd theta = collocation.fullPivLu().solve(vals);
      CHECK((D.matrix * theta).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("errors: penalty order out of range") {
  CHECK_THROWS_AS(penaltyMatrix(BSplineBasis(3, 2), 3), std::domain_error);
  CHECK_THROWS_AS(penaltyMatrix(BSplineBasis(3, 2), -1), std::domain_error);
}

TEST_CASE("Gram matrix scaling across K (sigma_min/max times K bounded)") {
  // Spectral sanity: singular values of the q=0 Gram scale like 1/K.
  std::vector<double> smin_k, smax_k, dmax_k;
  for (int K : {4, 8, 16, 32}) {
    const BSplineBasis basis(K, 3);
    const Eigen::MatrixXd G = penaltyMatrix(basis, 0).matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    smin_k.push_back(es.eigenvalues().minCoeff() * K);
    smax_k.push_back(es.eigenvalues().maxCoeff() * K);
    const Eigen::MatrixXd D = penaltyMatrix(basis, 2).matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esd(D);
    dmax_k.push_back(esd.eigenvalues().maxCoeff() / std::pow(double(K), 3));
  }
  for (auto* v : {&smin_k, &smax_k, &dmax_k}) {
    const double lo = *std::min_element(v->begin(), v->end());
    const double hi = *std::max_element(v->begin(), v->end());
    CHECK(hi / lo < 10.0);
  }
}
