#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lcm/samplers.hpp"

namespace lcm {

// r orthonormal columns spanning part of the residual space of X: Phi'Phi = I, X'Phi = 0.
// Taken from the Householder completion of X's column space (deterministic ordering).
Eigen::MatrixXd moran_basis(const Eigen::MatrixXd& X, int r);

struct SimDesign {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Phi;
  Eigen::MatrixXd Vinv_true;  // lower unit triangular
  Eigen::VectorXd beta, eta, xi;
  Eigen::VectorXd p;  // logistic(X beta + Phi eta + xi)
  Eigen::VectorXd Z_binomial;
  Eigen::VectorXd Z_negbinomial;  // count with pmf C(z+t-1, z) p^z (1-p)^t
  int t = 10;
};

SimDesign gen_sim_design(int n, int p, int r, int t, RngStream& rng);
SimDesign gen_sim_design(int n, int p = 3, int r = 10, int t = 10, std::uint64_t seed = 1);

std::int64_t sample_binomial(int t, double prob, RngStream& rng);
// Number of probability-`prob` events before t of the complementary events.
std::int64_t sample_negbinomial(int t, double log_prob, RngStream& rng);

}  // namespace lcm
