#include "lcm/gibbs.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "lcm/errors.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool draw_block(const CMcSpec& spec, VectorXd& target, RngStream& rng, StepStats& stats) {
  if (!spec.H) return false;
  VectorXd q = cmc_sample(spec, rng);
  if (!q.allFinite()) {
    ++stats.rejected_blocks;
    return false;
  }
  target = std::move(q);
  return true;
}

DYSuffStats suff_stats(PartitionKind kind, const double* s, Index m) {
  DYSuffStats st;
  st.m = static_cast<double>(m);
  for (Index i = 0; i < m; ++i) {
    st.sum_s += s[i];
    st.sum_psi += in_support(kind, s[i]) ? psi_eval(kind, s[i]) : std::numeric_limits<double>::infinity();
  }
  return st;
}

}  // namespace

double hyper_log_target(PartitionKind kind, double alpha, double kappa, std::array<double, 2> gamma, double rho,
                        const DYSuffStats& st) {
  if (!std::isfinite(alpha) || !std::isfinite(kappa) || validate(kind, {alpha, kappa})) return kNegInf;
  if (!std::isfinite(st.sum_psi)) return kNegInf;
  const double lk = log_K(kind, {alpha, kappa});
  const double v = (gamma[0] + st.sum_s) * alpha + (gamma[1] - st.sum_psi) * kappa + (rho + st.m) * lk;
  return std::isfinite(v) ? v : kNegInf;
}

int update_hyper_pair(PartitionKind kind, double& alpha, double& kappa, std::array<double, 2> gamma, double rho,
                      const DYSuffStats& st, const McmcSettings& mcmc, RngStream& rng) {
  int warnings = 0;
  auto step = [&](const std::function<double(double)>& f, double x0) {
    const SliceResult res = slice_sample_1d(f, x0, mcmc.slice_width, mcmc.slice_max_steps, rng);
    warnings += res.warning ? 1 : 0;
    return res.value;
  };
  switch (kind) {
    case PartitionKind::Quadratic: {
      const double a = alpha;
      auto f = [&](double u) { return hyper_log_target(kind, a, std::exp(u), gamma, rho, st) + u; };
      kappa = std::exp(step(f, std::log(kappa)));
      break;
    }
    case PartitionKind::LogitBeta: {
      double u1 = std::log(alpha), u2 = std::log(kappa - alpha);
      auto f1 = [&](double u) {
        return hyper_log_target(kind, std::exp(u), std::exp(u) + std::exp(u2), gamma, rho, st) + u + u2;
      };
      u1 = step(f1, u1);
      auto f2 = [&](double u) {
        return hyper_log_target(kind, std::exp(u1), std::exp(u1) + std::exp(u), gamma, rho, st) + u1 + u;
      };
      u2 = step(f2, u2);
      alpha = std::exp(u1);
      kappa = alpha + std::exp(u2);
      break;
    }
    case PartitionKind::LogGamma:
    case PartitionKind::NegInvGamma: {
      double u1 = std::log(alpha), u2 = std::log(kappa);
      auto f1 = [&](double u) { return hyper_log_target(kind, std::exp(u), std::exp(u2), gamma, rho, st) + u + u2; };
      u1 = step(f1, u1);
      auto f2 = [&](double u) { return hyper_log_target(kind, std::exp(u1), std::exp(u), gamma, rho, st) + u1 + u; };
      u2 = step(f2, u2);
      alpha = std::exp(u1);
      kappa = std::exp(u2);
      break;
    }
  }
  return warnings;
}

int update_hyper_eta(GibbsState& s, const LCMConfig& c, RngStream& rng) {
  const Index r = c.r();
  if (r == 0) return 0;
  const PartitionKind kind = c.kind();
  const VectorXd w = s.vinv().triangularView<Eigen::UnitLower>() * s.eta;
  int warnings = 0;
  for (Index i = 0; i < r; ++i) {
    const DYSuffStats st = suff_stats(kind, &w[i], 1);
    warnings += update_hyper_pair(kind, s.alpha_eta[i], s.kappa_eta[i], c.hyper.gamma_eta, c.hyper.rho_eta, st,
                                  c.mcmc, rng);
  }
  return warnings;
}

int update_hyper_xi(GibbsState& s, const LCMConfig& c, RngStream& rng) {
  const PartitionKind kind = c.kind();
  const VectorXd w = c.xi_scale.size() == 0 ? s.xi : VectorXd(c.xi_scale.cwiseProduct(s.xi));
  const DYSuffStats st = suff_stats(kind, w.data(), w.size());
  return update_hyper_pair(kind, s.alpha_xi, s.kappa_xi, c.hyper.gamma_xi, c.hyper.rho_xi, st, c.mcmc, rng);
}

void gibbs_step(GibbsState& s, const LCMConfig& c, const DesignCache& cache, RngStream& rng, StepStats& stats) {
  draw_block(build_beta_cond(s, c, cache), s.beta, rng, stats);
  draw_block(build_eta_cond(s, c, cache), s.eta, rng, stats);
  draw_block(build_xi_cond(s, c, cache), s.xi, rng, stats);
  if (c.mcmc.update_v) {
    for (int i = 2; i <= c.r(); ++i) draw_block(build_v_cond(i, s, c), s.v_rows[i - 1], rng, stats);
  }
  if (c.mcmc.update_hyper) {
    stats.slice_warnings += update_hyper_eta(s, c, rng);
    stats.slice_warnings += update_hyper_xi(s, c, rng);
  }
}

GibbsState gibbs_step(const GibbsState& state, const LCMConfig& c, RngStream& rng) {
  validate_config(c);
  validate_state(state, c);
  GibbsState s = state;
  StepStats stats;
  gibbs_step(s, c, make_design_cache(c), rng, stats);
  return s;
}

ChainOutput run_chain(const LCMConfig& c, RngStream& rng) {
  validate_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  GibbsState s = c.init ? *c.init : GibbsState::initial(c.p(), c.r(), c.n(), c.kind());
  const DesignCache cache = make_design_cache(c);
  ChainOutput out;
  out.p = c.p();
  out.r = c.r();
  out.n = c.n();
  out.has_xi = c.mcmc.store_xi;
  out.names = state_names(out.p, out.r, out.n, out.has_xi);
  out.draws.resize(c.mcmc.iters / c.mcmc.thin, static_cast<Index>(out.names.size()));
  StepStats stats;
  Index row = 0;
  for (int it = 0; it < c.mcmc.burnin + c.mcmc.iters; ++it) {
    // The inputs were validated above, so a builder or factorization error here is a failure of the run.
    try {
      gibbs_step(s, c, cache, rng, stats);
    } catch (const ValidationError& e) {
      throw RuntimeFailure("sweep " + std::to_string(it + 1) + ": " + e.what());
    }
    const int post = it - c.mcmc.burnin + 1;
    if (post > 0 && post % c.mcmc.thin == 0) {
      out.draws.row(row++) = flatten_state(s, out.has_xi).transpose();
      out.fit.add(linear_predictor(s, c), c.data_model, c.Z);
    }
  }
  out.final_state = s;
  out.rejected_blocks = stats.rejected_blocks;
  out.slice_warnings = stats.slice_warnings;
  summarize(out);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace lcm
