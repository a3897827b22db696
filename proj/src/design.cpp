#include "lcm/design.hpp"

#include <cmath>

#include <Eigen/QR>

#include "lcm/errors.hpp"
#include "lcm/numeric.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd moran_basis(const MatrixXd& X, int r) {
  const Index n = X.rows(), p = X.cols();
  if (r < 0) throw ValidationError("moran_basis: r must be >= 0");
  if (r > n - p) {
    throw ValidationError("moran_basis: r=" + std::to_string(r) + " exceeds n - p = " + std::to_string(n - p));
  }
  if (!X.allFinite()) throw ValidationError("moran_basis: X must be finite");
  if (p == 0) return MatrixXd::Identity(n, r);
  const Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  if (qr.rank() < p) throw ValidationError("moran_basis: X is rank deficient");
  MatrixXd E = MatrixXd::Zero(n, r);
  for (int j = 0; j < r; ++j) E(p + j, j) = 1.0;
  return qr.householderQ() * E;
}

std::int64_t sample_binomial(int t, double prob, RngStream& rng) {
  std::int64_t z = 0;
  for (int k = 0; k < t; ++k) z += rng.uniform() < prob ? 1 : 0;
  return z;
}

std::int64_t sample_negbinomial(int t, double log_prob, RngStream& rng) {
  // Sum of t geometric counts with P(G >= k) = prob^k.
  std::int64_t z = 0;
  for (int k = 0; k < t; ++k) z += static_cast<std::int64_t>(std::floor(std::log(rng.uniform()) / log_prob));
  return z;
}

SimDesign gen_sim_design(int n, int p, int r, int t, RngStream& rng) {
  if (n < 1 || p < 0 || r < 0 || t < 1) throw ValidationError("gen_sim_design: need n >= 1, p, r >= 0, t >= 1");
  auto normal_matrix = [&](Index rows, Index cols) {
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
  };
  SimDesign d;
  d.t = t;
  d.X = normal_matrix(n, p);
  d.Phi = normal_matrix(n, r);
  d.Vinv_true = MatrixXd::Identity(r, r);
  for (Index i = 1; i < r; ++i)
    for (Index j = 0; j < i; ++j) d.Vinv_true(i, j) = rng.normal();
  d.beta = normal_matrix(p, 1);
  d.eta = normal_matrix(r, 1);
  d.xi = normal_matrix(n, 1);
  const VectorXd y = d.X * d.beta + d.Phi * d.eta + d.xi;
  d.p.resize(n);
  d.Z_binomial.resize(n);
  d.Z_negbinomial.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.p[i] = logistic(y[i]);
    d.Z_binomial[i] = static_cast<double>(sample_binomial(t, d.p[i], rng));
    d.Z_negbinomial[i] = static_cast<double>(sample_negbinomial(t, -log1pexp(-y[i]), rng));
  }
  return d;
}

SimDesign gen_sim_design(int n, int p, int r, int t, std::uint64_t seed) {
  RngStream rng(seed);
  return gen_sim_design(n, p, r, t, rng);
}

}  // namespace lcm
