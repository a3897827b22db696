#include <cmath>

#include "doctest.h"
#include "lcm/design.hpp"
#include "lcm/errors.hpp"
#include "lcm/numeric.hpp"

using namespace lcm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int rows, int cols, RngStream& rng) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("moran_basis of a constant column") {
  const MatrixXd phi = moran_basis(MatrixXd::Ones(2, 1), 1);
  REQUIRE(phi.rows() == 2);
  REQUIRE(phi.cols() == 1);
  CHECK(std::fabs(std::fabs(phi(0, 0)) - 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(phi(0, 0) == doctest::Approx(-phi(1, 0)));
}

TEST_CASE("moran_basis: orthonormal, orthogonal to X, eigenvectors of the residual projector") {
  RngStream rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 5 + rep, p = rep % 4, r = (n - p) / 2 + 1;
    const MatrixXd X = random_matrix(n, p, rng);
    const MatrixXd phi = moran_basis(X, r);
    CHECK((phi.transpose() * phi - MatrixXd::Identity(r, r)).norm() < 1e-10);
    if (p > 0) {
      CHECK((X.transpose() * phi).norm() < 1e-10);
      const MatrixXd M = MatrixXd::Identity(n, n) - X * (X.transpose() * X).ldlt().solve(X.transpose());
      CHECK((M * phi - phi).norm() < 1e-10);
    }
    CHECK(moran_basis(X, r) == phi);
  }
}

TEST_CASE("moran_basis with r = n - p completes the column space") {
  RngStream rng(2);
  const MatrixXd X = random_matrix(7, 3, rng);
  const MatrixXd phi = moran_basis(X, 4);
  MatrixXd full(7, 7);
  const MatrixXd q = X.householderQr().householderQ() * MatrixXd::Identity(7, 3);
  full << q, phi;
  CHECK((full.transpose() * full - MatrixXd::Identity(7, 7)).norm() < 1e-10);
}

TEST_CASE("moran_basis errors") {
  RngStream rng(3);
  CHECK_THROWS_AS(moran_basis(random_matrix(5, 2, rng), 4), ValidationError);
  MatrixXd X = random_matrix(6, 2, rng);
  X.col(1) = 2.0 * X.col(0);
  CHECK_THROWS_AS(moran_basis(X, 2), ValidationError);
  CHECK_THROWS_AS(moran_basis(random_matrix(5, 2, rng), -1), ValidationError);
  CHECK(moran_basis(MatrixXd::Zero(4, 0), 2) == MatrixXd::Identity(4, 2));
}

TEST_CASE("gen_sim_design shapes, supports and determinism") {
  const SimDesign d = gen_sim_design(40, 3, 10, 10, std::uint64_t{5});
  CHECK(d.X.rows() == 40);
  CHECK(d.X.cols() == 3);
  CHECK(d.Phi.cols() == 10);
  CHECK(d.beta.size() == 3);
  CHECK(d.eta.size() == 10);
  CHECK(d.xi.size() == 40);
  CHECK(d.Vinv_true.diagonal() == VectorXd::Ones(10));
  CHECK(d.Vinv_true.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0));
  const VectorXd y = d.X * d.beta + d.Phi * d.eta + d.xi;
  for (int i = 0; i < 40; ++i) {
    CHECK(d.p[i] > 0.0);
    CHECK(d.p[i] < 1.0);
    CHECK(d.p[i] == doctest::Approx(logistic(y[i])));
    CHECK(d.Z_binomial[i] >= 0);
    CHECK(d.Z_binomial[i] <= 10);
    CHECK(d.Z_binomial[i] == std::round(d.Z_binomial[i]));
    CHECK(d.Z_negbinomial[i] >= 0);
  }
  const SimDesign e = gen_sim_design(40, 3, 10, 10, std::uint64_t{5});
  CHECK(e.Z_binomial == d.Z_binomial);
  CHECK(e.Z_negbinomial == d.Z_negbinomial);
  CHECK(e.X == d.X);
}

TEST_CASE("gen_sim_design: binomial proportions track p") {
  const int n = 200000;
  const SimDesign d = gen_sim_design(n, 1, 1, 10, std::uint64_t{6});
  const VectorXd diff = d.Z_binomial / 10.0 - d.p;
  // Var(Z/t - p) = p(1-p)/t <= 1/40.
  CHECK(std::fabs(diff.mean()) < 4 * std::sqrt(1.0 / 40.0 / n));
}

TEST_CASE("count samplers match their moments") {
  RngStream rng(7);
  const int n = 200000;
  VectorXd b(n), nb(n);
  const double prob = 0.3;
  for (int i = 0; i < n; ++i) {
    b[i] = static_cast<double>(sample_binomial(8, prob, rng));
    nb[i] = static_cast<double>(sample_negbinomial(4, std::log(prob), rng));
  }
  auto var = [](const VectorXd& x) { return (x.array() - x.mean()).square().sum() / (x.size() - 1.0); };
  const double bm = 8 * prob, bv = 8 * prob * (1 - prob);
  CHECK(std::fabs(b.mean() - bm) < 4 * std::sqrt(bv / n));
  CHECK(var(b) == doctest::Approx(bv).epsilon(0.02));
  // Failures-before-t-successes count with counted-event probability prob.
  const double nm = 4 * prob / (1 - prob), nv = 4 * prob / ((1 - prob) * (1 - prob));
  CHECK(std::fabs(nb.mean() - nm) < 4 * std::sqrt(nv / n));
  CHECK(var(nb) == doctest::Approx(nv).epsilon(0.03));
}
