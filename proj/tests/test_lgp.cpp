#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "lcm/cm.hpp"
#include "lcm/design.hpp"
#include "lcm/errors.hpp"
#include "lcm/gibbs.hpp"
#include "lcm/lgp.hpp"

using namespace lcm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int rows, int cols, RngStream& rng, double scale = 1.0) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

double batch_se(const VectorXd& x, int batches = 50) {
  const Eigen::Index len = x.size() / batches;
  VectorXd means(batches);
  for (int b = 0; b < batches; ++b) means[b] = x.segment(b * len, len).mean();
  const double m = means.mean();
  return std::sqrt((means.array() - m).square().sum() / (batches - 1.0) / batches);
}

double log_normal(double x, double var) { return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * x * x / var; }

double log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1) * std::log(x) - rate * x;
}

LGPConfig empty_config(int p, int r) {
  LGPConfig c;
  c.data_model = DataModel::gaussian();
  c.X = MatrixXd::Zero(0, p);
  c.Phi = MatrixXd::Zero(0, r);
  c.Z = VectorXd::Zero(0);
  return c;
}

// Gaussian data with every kappa = 1/2 and V fixed, shared by both samplers.
struct Toy {
  LCMConfig lcm;
  LGPConfig lgp;
  VectorXd mean;
  MatrixXd cov;
};

Toy gaussian_toy(std::uint64_t seed) {
  RngStream rng(seed);
  const int n = 15, p = 2, r = 2;
  Toy t;
  LCMConfig& c = t.lcm;
  c.data_model = DataModel::gaussian();
  c.X = random_matrix(n, p, rng);
  c.Phi = random_matrix(n, r, rng);
  c.Z = random_matrix(n, 1, rng, 1.5);
  c.hyper = HyperParams::defaults(PartitionKind::Quadratic);
  c.hyper.kappa_beta = 0.5;
  c.hyper.sigma_beta = 1.5;
  c.mcmc.update_v = false;
  c.mcmc.update_hyper = false;
  GibbsState s = GibbsState::initial(p, r, n, PartitionKind::Quadratic);
  s.v_rows[1] << 0.6;
  c.init = s;
  t.lgp = LGPConfig::from_lcm(c);
  t.lgp.hyper = c.hyper;
  t.lgp.init = s;

  MatrixXd A(n, p + r + n);
  A << c.X, c.Phi, MatrixXd::Identity(n, n);
  MatrixXd P = A.transpose() * A;
  const MatrixXd Vinv = s.vinv();
  P.topLeftCorner(p, p).diagonal().array() += 1.0 / (1.5 * 1.5);
  P.block(p, p, r, r) += Vinv.transpose() * Vinv;
  P.bottomRightCorner(n, n).diagonal().array() += 1.0;
  t.cov = P.inverse();
  t.mean = P.ldlt().solve(A.transpose() * c.Z);
  return t;
}

}  // namespace

TEST_CASE("lgp_log_joint: dimension and support") {
  const LGPConfig c = empty_config(2, 2);
  CHECK(lgp_theta_dim(2, 2, 0) == 2 + 2 + 1 + 2 + 1);
  CHECK_THROWS_AS(lgp_log_joint(VectorXd::Zero(3), c), ValidationError);
  VectorXd theta = VectorXd::Zero(8);
  CHECK(std::isfinite(lgp_log_joint(theta, c)));
  theta[6] = std::numeric_limits<double>::infinity();
  CHECK(lgp_log_joint(theta, c) == -std::numeric_limits<double>::infinity());
  theta[6] = std::numeric_limits<double>::quiet_NaN();
  CHECK(lgp_log_joint(theta, c) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("lgp_log_joint at theta = 0 without data is a sum of prior constants") {
  const LGPConfig c = empty_config(2, 2);
  const HyperParams& h = c.hyper;
  const double var_beta = h.sigma_beta * h.sigma_beta / (2 * h.kappa_beta);
  const double var_v = h.sigma_v * h.sigma_v / (2 * h.kappa_v);
  // log kappa = 0: kappa = 1, unit-variance-halved normals, Gamma densities at 1 (zero Jacobian).
  double expect = 2 * log_normal(0, var_beta) + log_normal(0, var_v) + 2 * log_normal(0, 0.5);
  expect += 2 * log_gamma_pdf(1.0, h.rho_eta / 2 + 1, -h.gamma_eta[1]);
  expect += log_gamma_pdf(1.0, h.rho_xi / 2 + 1, -h.gamma_xi[1]);
  CHECK(lgp_log_joint(VectorXd::Zero(8), c) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("lgp eta block agrees with the quadratic CM log-density") {
  RngStream rng(3);
  const LGPConfig c = empty_config(0, 3);
  for (int rep = 0; rep < 10; ++rep) {
    GibbsState s = GibbsState::initial(0, 3, 0, PartitionKind::Quadratic);
    s.v_rows[1] = random_matrix(1, 1, rng);
    s.v_rows[2] = random_matrix(2, 1, rng);
    s.kappa_eta = (0.2 + 2.0 * random_matrix(3, 1, rng).array().abs()).matrix();
    const VectorXd e1 = random_matrix(3, 1, rng), e2 = random_matrix(3, 1, rng);
    CMParams cm;
    cm.mu = VectorXd::Zero(3);
    cm.Vinv = s.vinv();
    cm.alpha = VectorXd::Zero(3);
    cm.kappa = s.kappa_eta;
    cm.kind = PartitionKind::Quadratic;
    GibbsState a = s, b = s;
    a.eta = e1;
    b.eta = e2;
    const double lgp_diff = lgp_log_joint(lgp_theta_from_state(a), c) - lgp_log_joint(lgp_theta_from_state(b), c);
    CHECK(lgp_diff == doctest::Approx(cm_logpdf(cm, e1) - cm_logpdf(cm, e2)).epsilon(1e-10));
  }
}

TEST_CASE("theta and state conversions are inverse") {
  RngStream rng(4);
  GibbsState s = GibbsState::initial(2, 3, 4, PartitionKind::Quadratic);
  s.beta = random_matrix(2, 1, rng);
  s.eta = random_matrix(3, 1, rng);
  s.xi = random_matrix(4, 1, rng);
  s.v_rows[1] = random_matrix(1, 1, rng);
  s.v_rows[2] = random_matrix(2, 1, rng);
  s.kappa_eta << 0.3, 1.2, 4.0;
  s.kappa_xi = 2.5;
  const VectorXd theta = lgp_theta_from_state(s);
  CHECK(theta.size() == lgp_theta_dim(2, 3, 4));
  const GibbsState back = lgp_state_from_theta(theta, 2, 3, 4);
  CHECK((flatten_state(back, true) - flatten_state(s, true)).norm() < 1e-14);
}

TEST_CASE("lgp chain reproduces the Gaussian posterior and the LCM chain") {
  Toy t = gaussian_toy(5);
  t.lgp.mcmc.burnin = 200;
  t.lgp.mcmc.iters = 20000;
  t.lcm.mcmc.burnin = 200;
  t.lcm.mcmc.iters = 20000;
  RngStream r1(1), r2(2);
  const ChainOutput g = lgp_run_chain(t.lgp, r1);
  const ChainOutput l = run_chain(t.lcm, r2);
  for (int j = 0; j < 4; ++j) {
    CAPTURE(g.names[j]);
    const VectorXd a = g.draws.col(j), b = l.draws.col(j);
    const double sa = batch_se(a), sb = batch_se(b);
    CHECK(std::fabs(a.mean() - t.mean[j]) < 4 * sa);
    CHECK(std::fabs(a.mean() - b.mean()) < 4 * std::hypot(sa, sb));
    const VectorXd sq = (a.array() - t.mean[j]).square();
    CHECK(std::fabs(sq.mean() - t.cov(j, j)) < 4 * batch_se(sq));
  }
}

TEST_CASE("one lgp sweep leaves an exact posterior draw distributed exactly") {
  // n = 1, p = 1, r = 0 with fixed kappa: (beta, xi) | z is bivariate normal.
  LGPConfig c;
  c.data_model = DataModel::gaussian();
  c.X = MatrixXd::Constant(1, 1, 0.8);
  c.Phi = MatrixXd::Zero(1, 0);
  c.Z = VectorXd::Constant(1, 1.3);
  c.hyper.kappa_beta = 0.5;
  c.hyper.sigma_beta = 1.0;
  c.mcmc.update_hyper = false;
  c.mcmc.burnin = 0;
  c.mcmc.iters = 1;
  MatrixXd A(1, 2);
  A << 0.8, 1.0;
  const MatrixXd P = A.transpose() * A + MatrixXd::Identity(2, 2);
  const MatrixXd cov = P.inverse();
  const VectorXd mean = P.ldlt().solve(A.transpose() * c.Z);
  const MatrixXd L = cov.llt().matrixL();

  RngStream rng(6);
  const int reps = 20000;
  MatrixXd out(reps, 2);
  for (int k = 0; k < reps; ++k) {
    const VectorXd draw = mean + L * random_matrix(2, 1, rng);
    GibbsState s = GibbsState::initial(1, 0, 1, PartitionKind::Quadratic);
    s.beta[0] = draw[0];
    s.xi[0] = draw[1];
    c.init = s;
    const ChainOutput ch = lgp_run_chain(c, rng);
    out(k, 0) = ch.draws(0, 0);
    out(k, 1) = ch.draws(0, 1);
  }
  for (int j = 0; j < 2; ++j) {
    const VectorXd col = out.col(j);
    const double sd = std::sqrt(cov(j, j));
    CHECK(std::fabs(col.mean() - mean[j]) < 4 * sd / std::sqrt(reps));
    const double var = (col.array() - col.mean()).square().mean();
    // Var of the sample variance of a normal is 2 sigma^4 / n.
    CHECK(std::fabs(var - cov(j, j)) < 4 * std::sqrt(2.0 / reps) * cov(j, j));
  }
  const double c01 = ((out.col(0).array() - out.col(0).mean()) * (out.col(1).array() - out.col(1).mean())).mean();
  CHECK(std::fabs(c01 - cov(0, 1)) < 4 * std::sqrt((cov(0, 0) * cov(1, 1) + cov(0, 1) * cov(0, 1)) / reps));
}

TEST_CASE("lgp_run_chain is deterministic by seed") {
  Toy t = gaussian_toy(7);
  t.lgp.mcmc.update_v = true;
  t.lgp.mcmc.update_hyper = true;
  t.lgp.mcmc.burnin = 10;
  t.lgp.mcmc.iters = 50;
  RngStream a(9), b(9);
  const ChainOutput x = lgp_run_chain(t.lgp, a), y = lgp_run_chain(t.lgp, b);
  CHECK(x.draws == y.draws);
  CHECK(x.names == state_names(2, 2, 15, true));
}

TEST_CASE("simulation-design smoke: lgp binomial n=30 completes with finite summaries") {
  const SimDesign d = gen_sim_design(30, 3, 10, 10, std::uint64_t{1});
  LGPConfig c;
  c.data_model = DataModel::binomial(10);
  c.Z = d.Z_binomial;
  c.X = d.X;
  c.Phi = d.Phi;
  RngStream rng(1);
  const ChainOutput out = lgp_run_chain(c, rng);
  CHECK(out.stored() == 4000);
  CHECK(out.draws.allFinite());
  for (const ParamSummary& s : out.summaries) CHECK(std::isfinite(s.mean));
}
