#include "lcm/lgp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lcm/errors.hpp"
#include "lcm/numeric.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log N(x; 0, 1 / (2 kappa)).
double normal_kappa(double x, double kappa) { return 0.5 * std::log(2.0 * kappa) - kHalfLog2Pi - kappa * x * x; }

// log Gamma(kappa; rho / 2 + 1, rate -g2) + log kappa, in terms of u = log kappa.
double log_kappa_prior(double u, double g2, double rho) {
  const double shape = rho / 2.0 + 1.0, rate = -g2;
  return shape * std::log(rate) - log_gamma(shape) + shape * u - rate * std::exp(u);
}

struct Layout {
  Index p, r, n, beta, eta, xi, v, keta, kxi, dim;
  Layout(Index p_, Index r_, Index n_) : p(p_), r(r_), n(n_) {
    beta = 0;
    eta = p;
    xi = eta + r;
    v = xi + n;
    keta = v + r * (r - 1) / 2;
    kxi = keta + r;
    dim = kxi + 1;
  }
};

void validate_lgp(const LGPConfig& c) {
  LCMConfig view = c.as_lcm();
  view.hyper = HyperParams::defaults(view.kind());
  view.init.reset();
  validate_config(view);
  c.hyper.validate(PartitionKind::Quadratic);
  if (c.init) {
    view.data_model = DataModel::gaussian();
    validate_state(*c.init, view);
  }
}

MatrixXd vinv_from(const VectorXd& theta, const Layout& L) {
  MatrixXd m = MatrixXd::Identity(L.r, L.r);
  Index k = L.v;
  for (Index i = 1; i < L.r; ++i)
    for (Index j = 0; j < i; ++j) m(i, j) = theta[k++];
  return m;
}

// Cached pieces of the joint so that each coordinate update touches only the terms that involve it.
class Target {
 public:
  Target(const LGPConfig& c, VectorXd theta)
      : c_(c), L_(c.p(), c.r(), c.n()), theta_(std::move(theta)), scale_(c.as_lcm().xi_scale_or_ones()) {
    const double sb = c.hyper.sigma_beta, sv = c.hyper.sigma_v;
    kb_ = c.hyper.kappa_beta / (sb * sb);
    kv_ = c.hyper.kappa_v / (sv * sv);
    refresh();
  }

  const VectorXd& theta() const { return theta_; }

  // Whether coordinate j is updated under the MCMC settings.
  bool sampled(Index j) const {
    if (j >= L_.v && j < L_.keta) return c_.mcmc.update_v;
    if (j >= L_.keta) return c_.mcmc.update_hyper;
    return true;
  }

  void refresh() {
    y_ = theta_.segment(L_.xi, L_.n);
    if (L_.p > 0) y_.noalias() += c_.X * theta_.segment(L_.beta, L_.p);
    if (L_.r > 0) y_.noalias() += c_.Phi * theta_.segment(L_.eta, L_.r);
    vinv_ = vinv_from(theta_, L_);
    w_ = vinv_ * theta_.segment(L_.eta, L_.r);
  }

  // Log joint as a function of coordinate j set to x, up to terms not involving j.
  double local(Index j, double x) const {
    if (!std::isfinite(x)) return kNegInf;
    const double old = theta_[j];
    if (j < L_.eta) return lik_shift(c_.X.col(j - L_.beta), x - old) + normal_kappa(x, kb_);
    if (j < L_.xi) {
      const Index e = j - L_.eta;
      const VectorXd w = w_ + vinv_.col(e) * (x - old);
      return lik_shift(c_.Phi.col(e), x - old) + eta_prior(w, theta_.segment(L_.keta, L_.r));
    }
    if (j < L_.v) {
      const Index i = j - L_.xi;
      const double lp = safe_pmf(c_.Z[i], y_[i] + x - old);
      return lp + normal_kappa(scale_[i] * x, std::exp(theta_[L_.kxi]));
    }
    if (j < L_.keta) {
      const auto [row, col] = v_position(j - L_.v);
      const double w_row = w_[row] + (x - old) * theta_[L_.eta + col];
      return normal_kappa(w_row, std::exp(theta_[L_.keta + row])) + normal_kappa(x, kv_);
    }
    if (j < L_.kxi) {
      const Index i = j - L_.keta;
      return normal_kappa(w_[i], std::exp(x)) + log_kappa_prior(x, c_.hyper.gamma_eta[1], c_.hyper.rho_eta);
    }
    const double kappa = std::exp(x);
    double total = log_kappa_prior(x, c_.hyper.gamma_xi[1], c_.hyper.rho_xi);
    for (Index i = 0; i < L_.n; ++i) total += normal_kappa(scale_[i] * theta_[L_.xi + i], kappa);
    return total;
  }

  void set(Index j, double x) {
    const double delta = x - theta_[j];
    theta_[j] = x;
    if (j < L_.eta) {
      y_ += c_.X.col(j - L_.beta) * delta;
    } else if (j < L_.xi) {
      const Index e = j - L_.eta;
      y_ += c_.Phi.col(e) * delta;
      w_ += vinv_.col(e) * delta;
    } else if (j < L_.v) {
      y_[j - L_.xi] += delta;
    } else if (j < L_.keta) {
      const auto [row, col] = v_position(j - L_.v);
      vinv_(row, col) = x;
      w_[row] += delta * theta_[L_.eta + col];
    }
  }

 private:
  double safe_pmf(double z, double y) const {
    if (!std::isfinite(y)) return kNegInf;
    const double v = data_log_pmf(c_.data_model, z, y);
    return std::isnan(v) ? kNegInf : v;
  }

  double lik_shift(const Eigen::Ref<const VectorXd>& col, double delta) const {
    double total = 0.0;
    for (Index i = 0; i < L_.n; ++i) total += safe_pmf(c_.Z[i], y_[i] + col[i] * delta);
    return total;
  }

  static double eta_prior(const VectorXd& w, const Eigen::Ref<const VectorXd>& log_kappa) {
    double total = 0.0;
    for (Index i = 0; i < w.size(); ++i) total += normal_kappa(w[i], std::exp(log_kappa[i]));
    return total;
  }

  std::pair<Index, Index> v_position(Index k) const {
    Index row = 1;
    while (k >= row) k -= row++;
    return {row, k};
  }

  const LGPConfig& c_;
  Layout L_;
  VectorXd theta_;
  VectorXd scale_;
  double kb_ = 0.0, kv_ = 0.0;  // precision-like coefficients of the beta and v priors
  VectorXd y_, w_;
  MatrixXd vinv_;
};

}  // namespace

LGPConfig LGPConfig::from_lcm(const LCMConfig& c) {
  LGPConfig g;
  g.Z = c.Z;
  g.X = c.X;
  g.Phi = c.Phi;
  g.data_model = c.data_model;
  g.mcmc = c.mcmc;
  g.xi_scale = c.xi_scale;
  return g;
}

LCMConfig LGPConfig::as_lcm() const {
  LCMConfig c;
  c.Z = Z;
  c.X = X;
  c.Phi = Phi;
  c.data_model = data_model;
  c.hyper = hyper;
  c.mcmc = mcmc;
  c.xi_scale = xi_scale;
  c.init = init;
  return c;
}

Index lgp_theta_dim(Index p, Index r, Index n) { return Layout(p, r, n).dim; }

VectorXd lgp_theta_from_state(const GibbsState& s) {
  const Layout L(s.beta.size(), s.eta.size(), s.xi.size());
  VectorXd theta(L.dim);
  theta.segment(L.beta, L.p) = s.beta;
  theta.segment(L.eta, L.r) = s.eta;
  theta.segment(L.xi, L.n) = s.xi;
  Index k = L.v;
  for (Index i = 1; i < L.r; ++i) theta.segment(k, i) = s.v_rows[i], k += i;
  theta.segment(L.keta, L.r) = s.kappa_eta.array().log().matrix();
  theta[L.kxi] = std::log(s.kappa_xi);
  return theta;
}

GibbsState lgp_state_from_theta(const VectorXd& theta, Index p, Index r, Index n) {
  const Layout L(p, r, n);
  if (theta.size() != L.dim) throw ValidationError("lgp: theta has dimension " + std::to_string(theta.size()) +
                                                   ", expected " + std::to_string(L.dim));
  GibbsState s;
  s.beta = theta.segment(L.beta, p);
  s.eta = theta.segment(L.eta, r);
  s.xi = theta.segment(L.xi, n);
  s.v_rows.assign(r, VectorXd());
  Index k = L.v;
  for (Index i = 0; i < r; ++i) s.v_rows[i] = theta.segment(k, i), k += i;
  s.alpha_eta = VectorXd::Zero(r);
  s.kappa_eta = theta.segment(L.keta, r).array().exp().matrix();
  s.alpha_xi = 0.0;
  s.kappa_xi = std::exp(theta[L.kxi]);
  return s;
}

double lgp_log_joint(const VectorXd& theta, const LGPConfig& c) {
  const Layout L(c.p(), c.r(), c.n());
  if (theta.size() != L.dim) throw ValidationError("lgp: theta has dimension " + std::to_string(theta.size()) +
                                                   ", expected " + std::to_string(L.dim));
  if (!theta.allFinite()) return kNegInf;
  const GibbsState s = lgp_state_from_theta(theta, L.p, L.r, L.n);
  const HyperParams& h = c.hyper;
  double total = 0.0;
  if (L.n > 0) {
    const VectorXd y = linear_predictor(s, c.as_lcm());
    for (Index i = 0; i < L.n; ++i) {
      if (!std::isfinite(y[i])) return kNegInf;
      total += data_log_pmf(c.data_model, c.Z[i], y[i]);
    }
  }
  const double kb = h.kappa_beta / (h.sigma_beta * h.sigma_beta), kv = h.kappa_v / (h.sigma_v * h.sigma_v);
  for (Index j = 0; j < L.p; ++j) total += normal_kappa(s.beta[j], kb);
  for (Index i = 1; i < L.r; ++i)
    for (Index j = 0; j < i; ++j) total += normal_kappa(s.v_rows[i][j], kv);
  const VectorXd w = s.vinv() * s.eta;
  for (Index i = 0; i < L.r; ++i) {
    total += normal_kappa(w[i], s.kappa_eta[i]);
    total += log_kappa_prior(theta[L.keta + i], h.gamma_eta[1], h.rho_eta);
  }
  const VectorXd scale = c.xi_scale.size() == 0 ? VectorXd::Ones(L.n) : c.xi_scale;
  for (Index i = 0; i < L.n; ++i) total += normal_kappa(scale[i] * s.xi[i], s.kappa_xi) + std::log(scale[i]);
  total += log_kappa_prior(theta[L.kxi], h.gamma_xi[1], h.rho_xi);
  return std::isnan(total) ? kNegInf : total;
}

ChainOutput lgp_run_chain(const LGPConfig& c, RngStream& rng) {
  validate_lgp(c);
  if (c.n() > 500) {
    std::fprintf(stderr, "lgp_run_chain: n=%ld exceeds 500; coordinate-wise slice sampling will be slow\n",
                 static_cast<long>(c.n()));
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Index p = c.p(), r = c.r(), n = c.n();
  const GibbsState s0 = c.init ? *c.init : GibbsState::initial(p, r, n, PartitionKind::Quadratic);
  Target target(c, lgp_theta_from_state(s0));
  const LCMConfig view = c.as_lcm();

  ChainOutput out;
  out.p = p;
  out.r = r;
  out.n = n;
  out.has_xi = c.mcmc.store_xi;
  out.names = state_names(p, r, n, out.has_xi);
  out.draws.resize(c.mcmc.iters / c.mcmc.thin, static_cast<Index>(out.names.size()));
  const Index dim = target.theta().size();
  Index row = 0;
  for (int it = 0; it < c.mcmc.burnin + c.mcmc.iters; ++it) {
    for (Index j = 0; j < dim; ++j) {
      if (!target.sampled(j)) continue;
      const SliceResult res = slice_sample_1d([&](double x) { return target.local(j, x); }, target.theta()[j],
                                              c.mcmc.slice_width, c.mcmc.slice_max_steps, rng);
      out.slice_warnings += res.warning ? 1 : 0;
      target.set(j, res.value);
    }
    // Guard against drift in the incremental caches.
    if (it % 100 == 99) target.refresh();
    const int post = it - c.mcmc.burnin + 1;
    if (post > 0 && post % c.mcmc.thin == 0) {
      const GibbsState s = lgp_state_from_theta(target.theta(), p, r, n);
      out.draws.row(row++) = flatten_state(s, out.has_xi).transpose();
      out.fit.add(linear_predictor(s, view), c.data_model, c.Z);
    }
  }
  out.final_state = lgp_state_from_theta(target.theta(), p, r, n);
  summarize(out);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace lcm
