#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "lcm/conditionals.hpp"
#include "lcm/dy.hpp"
#include "lcm/errors.hpp"
#include "lcm/model.hpp"
#include "lcm/numeric.hpp"

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

// Small random instance with data on both boundaries where the family has them.
LCMConfig small_config(const DataModel& dm, RngStream& rng, int n = 4, int p = 2, int r = 3) {
  LCMConfig c;
  c.data_model = dm;
  c.X = random_matrix(n, p, rng);
  c.Phi = random_matrix(n, r, rng);
  c.Z.resize(n);
  for (int i = 0; i < n; ++i) {
    switch (dm.family) {
      case Family::Poisson: c.Z[i] = i == 0 ? 0.0 : static_cast<double>(i + 1); break;
      case Family::Binomial: c.Z[i] = i == 0 ? 0.0 : (i == 1 ? dm.t : (dm.t > 1 ? 1.0 + (i % (dm.t - 1)) : i % 2)); break;
      case Family::NegBinomial: c.Z[i] = i == 0 ? 0.0 : static_cast<double>(2 * i); break;
      case Family::Gaussian: c.Z[i] = rng.normal(); break;
    }
  }
  c.hyper = HyperParams::defaults(dm.kind());
  c.hyper.sigma_beta = 2.0;
  c.hyper.sigma_v = 1.5;
  if (dm.kind() != PartitionKind::Quadratic) {
    c.hyper.alpha_beta = c.hyper.alpha_v = 3.0;
    c.hyper.kappa_beta = c.hyper.kappa_v = dm.kind() == PartitionKind::LogitBeta ? 7.0 : 4.0;
  } else {
    c.hyper.alpha_beta = 0.3;
    c.hyper.alpha_v = -0.2;
    c.hyper.kappa_beta = 0.8;
    c.hyper.kappa_v = 1.2;
  }
  return c;
}

GibbsState random_state(const LCMConfig& c, RngStream& rng) {
  GibbsState s = GibbsState::initial(c.p(), c.r(), c.n(), c.kind());
  s.beta = random_matrix(c.p(), 1, rng, 0.5);
  s.eta = random_matrix(c.r(), 1, rng, 0.5);
  s.xi = random_matrix(c.n(), 1, rng, 0.5);
  for (Eigen::Index k = 1; k < c.r(); ++k) s.v_rows[k] = random_matrix(k, 1, rng, 0.5);
  for (Eigen::Index k = 0; k < c.r(); ++k) {
    s.alpha_eta[k] = c.kind() == PartitionKind::Quadratic ? rng.normal() : 0.5 + 2.0 * rng.uniform();
    s.kappa_eta[k] = s.alpha_eta[k] * (c.kind() == PartitionKind::Quadratic ? 0.0 : 1.0) + 0.5 + 2.0 * rng.uniform();
  }
  s.alpha_xi = c.kind() == PartitionKind::Quadratic ? 0.4 : 1.7;
  s.kappa_xi = c.kind() == PartitionKind::LogitBeta ? 3.1 : 1.3;
  return s;
}

double log_lik(const GibbsState& s, const LCMConfig& c) {
  const VectorXd y = linear_predictor(s, c);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += data_log_pmf(c.data_model, c.Z[i], y[i]);
  return total;
}

double cm_prior(const VectorXd& x, const MatrixXd& Vinv, const VectorXd& alpha, const VectorXd& kappa,
                PartitionKind kind) {
  CMParams p;
  p.mu = VectorXd::Zero(x.size());
  p.Vinv = Vinv;
  p.alpha = alpha;
  p.kappa = kappa;
  p.kind = kind;
  return cm_logpdf(p, x);
}

// Log of data likelihood times every prior term of the model that involves the block being varied.
double log_joint(const GibbsState& s, const LCMConfig& c) {
  const auto p = c.p(), r = c.r(), n = c.n();
  const PartitionKind kind = c.kind();
  double total = log_lik(s, c);
  if (p > 0) {
    total += cm_prior(s.beta, MatrixXd::Identity(p, p) / c.hyper.sigma_beta, VectorXd::Constant(p, c.hyper.alpha_beta),
                      VectorXd::Constant(p, c.hyper.kappa_beta), kind);
  }
  if (r > 0) total += cm_prior(s.eta, s.vinv(), s.alpha_eta, s.kappa_eta, kind);
  for (Eigen::Index k = 1; k < r; ++k) {
    total += cm_prior(s.v_rows[k], MatrixXd::Identity(k, k) / c.hyper.sigma_v, VectorXd::Constant(k, c.hyper.alpha_v),
                      VectorXd::Constant(k, c.hyper.kappa_v), kind);
  }
  total += cm_prior(s.xi, c.xi_scale_or_ones().asDiagonal(), VectorXd::Constant(n, s.alpha_xi),
                    VectorXd::Constant(n, s.kappa_xi), kind);
  return total;
}

const DataModel kModels[] = {DataModel::poisson(), DataModel::binomial(5), DataModel::negbinomial(3),
                             DataModel::gaussian()};

}  // namespace

TEST_CASE("data_log_pmf examples") {
  CHECK(data_log_pmf(DataModel::poisson(), 0, 0) == doctest::Approx(-1.0));
  CHECK(data_log_pmf(DataModel::binomial(1), 1, 0) == doctest::Approx(std::log(0.5)));
  const double y = 0.4, prob = logistic(y);
  const double direct = std::log(4.0) + 3 * std::log(prob) + 2 * std::log(1 - prob);  // C(4,3) p^3 (1-p)^2
  CHECK(data_log_pmf(DataModel::negbinomial(2), 3, y) == doctest::Approx(direct).epsilon(1e-13));
  const double gauss = -0.5 * std::log(2 * std::numbers::pi) - 0.5 * (1.3 - 0.2) * (1.3 - 0.2);
  CHECK(data_log_pmf(DataModel::gaussian(), 1.3, 0.2) == doctest::Approx(gauss).epsilon(1e-13));
  CHECK_THROWS_AS(data_log_pmf(DataModel::binomial(3), 4, 0.0), std::domain_error);
  CHECK_THROWS_AS(data_log_pmf(DataModel::poisson(), 1.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(data_log_pmf(DataModel::negbinomial(2), -1, 0.0), std::domain_error);
}

TEST_CASE("data_log_pmf sums to one over the support") {
  for (double y : {-2.0, 0.0, 1.5}) {
    double pois = 0.0, nb = 0.0, bin = 0.0;
    for (int z = 0; z < 400; ++z) {
      pois += std::exp(data_log_pmf(DataModel::poisson(), z, y));
      nb += std::exp(data_log_pmf(DataModel::negbinomial(4), z, y));
      if (z <= 7) bin += std::exp(data_log_pmf(DataModel::binomial(7), z, y));
    }
    CHECK(pois == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nb == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bin == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("data model kinds and parsing") {
  CHECK(DataModel::poisson().kind() == PartitionKind::LogGamma);
  CHECK(DataModel::binomial(3).kind() == PartitionKind::LogitBeta);
  CHECK(DataModel::negbinomial(3).kind() == PartitionKind::LogitBeta);
  CHECK(DataModel::gaussian().kind() == PartitionKind::Quadratic);
  CHECK(DataModel::negbinomial(3).b(4) == 7.0);
  CHECK(DataModel::gaussian().b(2) == 0.5);
  CHECK(DataModel::parse("binomial", 10).t == 10);
  CHECK_THROWS_AS(DataModel::parse("gamma", 1), ValidationError);
  CHECK_THROWS_AS(DataModel::parse("binomial", 0), ValidationError);
  CHECK_THROWS_AS(DataModel::parse("weibull", 1), ValidationError);
}

TEST_CASE("boundary_d examples") {
  const VectorXd z2 = (VectorXd(2) << 0, 2).finished();
  CHECK(boundary_d(VectorXd::Constant(3, 1.0), VectorXd::Constant(3, 2.0), 5.0, z2, DataModel::gaussian()).isZero(0));
  const VectorXd d = boundary_d(VectorXd::Constant(3, 500.0), VectorXd::Constant(3, 500.0), 10.0, z2,
                                DataModel::poisson());
  CHECK(d[0] == doctest::Approx(500.0 / 510.0));
  CHECK(d[1] == 0.0);
  const VectorXd zb = (VectorXd(2) << 3, 1).finished();
  const VectorXd db = boundary_d(VectorXd::Constant(2, 250.0), VectorXd::Constant(2, 500.0), 0.0, zb,
                                 DataModel::binomial(3));
  CHECK(db[0] == doctest::Approx(-1.0));
  CHECK(db[1] == 0.0);
  // Negative binomial has no upper bound.
  const VectorXd dn = boundary_d(VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 2.0), 1.0, zb,
                                 DataModel::negbinomial(3));
  CHECK(dn.isZero(0));
}

TEST_CASE("hyperparameter defaults and propriety") {
  for (PartitionKind kind : {PartitionKind::LogGamma, PartitionKind::LogitBeta, PartitionKind::Quadratic,
                             PartitionKind::NegInvGamma}) {
    CHECK_NOTHROW(HyperParams::defaults(kind).validate(kind));
  }
  HyperParams h = HyperParams::defaults(PartitionKind::LogitBeta);
  CHECK(h.alpha_beta < h.kappa_beta);
  h.kappa_beta = h.alpha_beta;
  CHECK_THROWS_AS(h.validate(PartitionKind::LogitBeta), ValidationError);

  // gamma1/rho must sit inside the mean-value region: (1000, -1e-15) is improper for log-gamma.
  h = HyperParams::defaults(PartitionKind::LogGamma);
  h.gamma_xi = {1000.0, -1e-15};
  CHECK_THROWS_AS(h.validate(PartitionKind::LogGamma), ValidationError);
  h = HyperParams::defaults(PartitionKind::LogGamma);
  h.rho_eta = 0.0;
  CHECK_THROWS_AS(h.validate(PartitionKind::LogGamma), ValidationError);
  h = HyperParams::defaults(PartitionKind::LogitBeta);
  h.gamma_eta = {0.0, -1000.0};
  CHECK_NOTHROW(h.validate(PartitionKind::LogitBeta));
}

TEST_CASE("config and state validation") {
  RngStream rng(3);
  LCMConfig c = small_config(DataModel::binomial(5), rng);
  CHECK_NOTHROW(validate_config(c));
  LCMConfig bad = c;
  bad.Z[2] = 6;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  bad = c;
  bad.X.resize(3, 2);
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  bad = c;
  bad.mcmc.thin = 0;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  GibbsState s = GibbsState::initial(c.p(), c.r(), c.n(), c.kind());
  CHECK(s.vinv().isIdentity(0));
  s.kappa_eta[1] = s.alpha_eta[1];
  bad = c;
  bad.init = s;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
}

TEST_CASE("builder examples") {
  RngStream rng(4);
  LCMConfig c = small_config(DataModel::poisson(), rng, 5, 0, 3);
  GibbsState s = random_state(c, rng);
  CHECK(build_beta_cond(s, c).H == nullptr);

  c = small_config(DataModel::poisson(), rng, 5, 2, 0);
  s = random_state(c, rng);
  CHECK(build_eta_cond(s, c).H == nullptr);

  // Interior counts: no boundary shift.
  c = small_config(DataModel::poisson(), rng, 4, 2, 3);
  c.Z = (VectorXd(4) << 1, 2, 5, 3).finished();
  s = random_state(c, rng);
  for (auto& v : s.v_rows) v.setZero();
  const CMcSpec b = build_beta_cond(s, c);
  CHECK(b.alpha.head(4) == c.Z);
  CHECK(b.alpha.tail(2).isApproxToConstant(c.hyper.alpha_beta));
  CHECK(b.kappa.head(4).isOnes());
  const CMcSpec e = build_eta_cond(s, c);
  CHECK(e.kappa.tail(3) == s.kappa_eta);
  CHECK(e.alpha.tail(3) == s.alpha_eta);
  const CMcSpec x = build_xi_cond(s, c);
  CHECK((x.mu_star.head(4) + c.X * s.beta + c.Phi * s.eta).norm() < 1e-14);
  CHECK(x.mu_star.tail(4).isZero(0));
  CHECK(x.alpha.tail(4).isApproxToConstant(s.alpha_xi));

  const CMcSpec v2 = build_v_cond(2, s, c);
  CHECK(v2.H->to_dense()(0, 0) == s.eta[0]);
  CHECK(v2.mu_star[0] == -s.eta[1]);
  CHECK_THROWS_AS(build_v_cond(1, s, c), ValidationError);
  CHECK_THROWS_AS(build_v_cond(4, s, c), ValidationError);

  // eta_1 = 0: the data row vanishes and the v_2 conditional is the prior.
  s.eta[0] = 0.0;
  const CMcSpec v0 = build_v_cond(2, s, c);
  const double a = 0.3, bb = -0.8;
  const MatrixXd cinv = MatrixXd::Identity(1, 1) / c.hyper.sigma_v;
  const VectorXd av = VectorXd::Constant(1, c.hyper.alpha_v), kv = VectorXd::Constant(1, c.hyper.kappa_v);
  const double prior_diff = cm_prior(VectorXd::Constant(1, a), cinv, av, kv, c.kind()) -
                            cm_prior(VectorXd::Constant(1, bb), cinv, av, kv, c.kind());
  CHECK(cmc_logpdf_unnorm(v0, VectorXd::Constant(1, a)) - cmc_logpdf_unnorm(v0, VectorXd::Constant(1, bb)) ==
        doctest::Approx(prior_diff).epsilon(1e-12));
}

TEST_CASE("conjugacy identity: CM_c kernels match likelihood times prior") {
  RngStream rng(5);
  for (const DataModel& dm : kModels) {
    for (int rep = 0; rep < 3; ++rep) {
      const LCMConfig c = small_config(dm, rng);
      const GibbsState s = random_state(c, rng);
      const DesignCache cache = make_design_cache(c);
      CAPTURE(dm.name());
      auto check_block = [&](const CMcSpec& spec, auto set) {
        const VectorXd x0 = random_matrix(spec.H->cols(), 1, rng, 0.5);
        GibbsState a = s;
        set(a, x0);
        const double base_direct = log_joint(a, c);
        const double base_cmc = cmc_logpdf_unnorm(spec, x0);
        for (int k = 0; k < 4; ++k) {
          const VectorXd x = random_matrix(spec.H->cols(), 1, rng, 0.5);
          GibbsState b = s;
          set(b, x);
          CHECK(cmc_logpdf_unnorm(spec, x) - base_cmc == doctest::Approx(log_joint(b, c) - base_direct).epsilon(1e-9));
        }
      };
      check_block(build_beta_cond(s, c, cache), [](GibbsState& g, const VectorXd& x) { g.beta = x; });
      check_block(build_eta_cond(s, c, cache), [](GibbsState& g, const VectorXd& x) { g.eta = x; });
      check_block(build_xi_cond(s, c, cache), [](GibbsState& g, const VectorXd& x) { g.xi = x; });
      for (int i = 2; i <= c.r(); ++i) {
        check_block(build_v_cond(i, s, c), [i](GibbsState& g, const VectorXd& x) { g.v_rows[i - 1] = x; });
      }
    }
  }
}

TEST_CASE("conjugacy identity with a non-identity xi scale") {
  RngStream rng(6);
  LCMConfig c = small_config(DataModel::poisson(), rng);
  c.xi_scale = (VectorXd(4) << 1.0, 0.5, 2.0, 1.5).finished();
  const GibbsState s = random_state(c, rng);
  const CMcSpec spec = build_xi_cond(s, c);
  const VectorXd x0 = random_matrix(4, 1, rng, 0.5), x1 = random_matrix(4, 1, rng, 0.5);
  GibbsState a = s, b = s;
  a.xi = x0;
  b.xi = x1;
  CHECK(cmc_logpdf_unnorm(spec, x1) - cmc_logpdf_unnorm(spec, x0) ==
        doctest::Approx(log_joint(b, c) - log_joint(a, c)).epsilon(1e-9));
}

TEST_CASE("boundary safety: binomial data on both bounds gives valid pairs") {
  RngStream rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const int t = 1 + static_cast<int>(rng.uniform() * 10);
    LCMConfig c = small_config(DataModel::binomial(t), rng, 8, 3, 4);
    for (int i = 0; i < 8; ++i) c.Z[i] = (i % 3 == 0) ? 0.0 : (i % 3 == 1 ? t : std::floor(rng.uniform() * (t + 1)));
    c.X *= 1.0 + 5.0 * rng.uniform();
    c.hyper.alpha_beta = 0.05 + 5.0 * rng.uniform();
    c.hyper.kappa_beta = c.hyper.alpha_beta + 0.05 + 5.0 * rng.uniform();
    c.hyper.sigma_beta = 0.1 + 10.0 * rng.uniform();
    GibbsState s = random_state(c, rng);
    s.alpha_xi = 0.01 + 3.0 * rng.uniform();
    s.kappa_xi = s.alpha_xi + 0.01 + 3.0 * rng.uniform();
    const DesignCache cache = make_design_cache(c);
    CHECK_NOTHROW(build_beta_cond(s, c, cache));
    CHECK_NOTHROW(build_eta_cond(s, c, cache));
    CHECK_NOTHROW(build_xi_cond(s, c, cache));
    for (int i = 2; i <= c.r(); ++i) CHECK_NOTHROW(build_v_cond(i, s, c));
  }
}

TEST_CASE("Gaussian data: block moments match conjugate normal algebra") {
  // With psi4, alpha = 0 and every kappa = 1/2 the blocks are normal-normal updates.
  RngStream rng(8);
  LCMConfig c = small_config(DataModel::gaussian(), rng, 6, 2, 3);
  c.hyper.alpha_beta = 0.0;
  c.hyper.kappa_beta = 0.5;
  GibbsState s = random_state(c, rng);
  s.alpha_eta.setZero();
  s.kappa_eta.setConstant(0.5);
  s.alpha_xi = 0.0;
  s.kappa_xi = 0.5;
  const DesignCache cache = make_design_cache(c);
  const MatrixXd I6 = MatrixXd::Identity(6, 6);

  // beta | rest ~ N(P^{-1} X'(Z - o), P^{-1}), P = X'X + I / sigma^2.
  {
    const VectorXd o = c.Phi * s.eta + s.xi;
    const MatrixXd P = c.X.transpose() * c.X + MatrixXd::Identity(2, 2) / (c.hyper.sigma_beta * c.hyper.sigma_beta);
    const MomentPair m = cmc_moments(build_beta_cond(s, c, cache));
    CHECK((m.mean - P.ldlt().solve(c.X.transpose() * (c.Z - o))).norm() < 1e-10);
    CHECK((m.cov - P.inverse()).norm() < 1e-10);
  }
  // eta | rest with prior precision Vinv' Vinv.
  {
    const MatrixXd Vinv = s.vinv();
    const VectorXd o = c.X * s.beta + s.xi;
    const MatrixXd P = c.Phi.transpose() * c.Phi + Vinv.transpose() * Vinv;
    const MomentPair m = cmc_moments(build_eta_cond(s, c, cache));
    CHECK((m.mean - P.ldlt().solve(c.Phi.transpose() * (c.Z - o))).norm() < 1e-10);
    CHECK((m.cov - P.inverse()).norm() < 1e-10);
  }
  // xi_i | rest ~ N((Z_i - o_i)/2, 1/2).
  {
    const VectorXd o = c.X * s.beta + c.Phi * s.eta;
    const MomentPair m = cmc_moments(build_xi_cond(s, c, cache));
    CHECK((m.mean - (c.Z - o) / 2).norm() < 1e-12);
    CHECK((m.cov - 0.5 * I6).norm() < 1e-12);
  }
}
