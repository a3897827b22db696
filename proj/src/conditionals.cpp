#include "lcm/conditionals.hpp"

#include <functional>

#include "lcm/errors.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

BoundPair column_bounds(const MatrixXd& AV) {
  if (AV.size() == 0) return {};
  return {AV.colwise().sum().cwiseAbs().maxCoeff(), AV.cwiseAbs().colwise().sum().maxCoeff()};
}

namespace {

bool pairs_valid(PartitionKind kind, const VectorXd& alpha, const VectorXd& kappa) {
  for (Index i = 0; i < alpha.size(); ++i)
    if (validate(kind, {alpha[i], kappa[i]})) return false;
  return true;
}

// Bounds are tried in order: max_j |sum_i (A V)_ij| as printed, then max_j sum_i |(A V)_ij|, which keeps the
// shifted prior rows inside the DY region whenever only one boundary is active. If both boundaries are hit
// (logit-beta), fall back to one coefficient m/(m+S) with m = min(min alpha, min(kappa - alpha)).
VectorXd resolve_d(const VectorXd& alpha_prior, const VectorXd& kappa_prior, const BoundPair& bounds,
                   const LCMConfig& c, const VectorXd& b, const std::function<VectorXd(const VectorXd&)>& bottom_alpha) {
  const PartitionKind kind = c.kind();
  auto ok = [&](const VectorXd& d) {
    return pairs_valid(kind, c.Z + d, b) && pairs_valid(kind, bottom_alpha(d), kappa_prior);
  };
  VectorXd d = boundary_d(alpha_prior, kappa_prior, bounds.signed_sum, c.Z, c.data_model);
  if (d.isZero(0.0) || ok(d)) return d;
  d = boundary_d(alpha_prior, kappa_prior, bounds.abs_sum, c.Z, c.data_model);
  if (ok(d)) return d;
  double m = alpha_prior.minCoeff();
  if (c.data_model.bounded_above()) m = std::min(m, (kappa_prior - alpha_prior).minCoeff());
  const double coef = m / (m + bounds.abs_sum);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) d[i] = coef;
    if (d[i] < 0.0) d[i] = -coef;
  }
  return d;
}

VectorXd stack(const VectorXd& a, const VectorXd& b) {
  VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

DesignCache make_design_cache(const LCMConfig& c) {
  DesignCache cache;
  const Index n = c.n(), p = c.p();
  cache.b.resize(n);
  for (Index i = 0; i < n; ++i) cache.b[i] = c.data_model.b(c.Z[i]);
  if (p > 0) {
    cache.beta_H = ProjectionDesign::stacked(std::make_shared<const ProjectionDesign::Block>(c.X),
                                             MatrixXd::Identity(p, p) / c.hyper.sigma_beta, true);
    cache.beta_bounds = column_bounds(c.hyper.sigma_beta * c.X);
  }
  if (c.r() > 0) cache.phi_block = std::make_shared<const ProjectionDesign::Block>(c.Phi);
  cache.xi_scale = c.xi_scale_or_ones();
  cache.xi_H = ProjectionDesign::identity_over_diagonal(cache.xi_scale);
  cache.xi_bounds = {cache.xi_scale.cwiseInverse().maxCoeff(), cache.xi_scale.cwiseInverse().maxCoeff()};
  return cache;
}

CMcSpec build_beta_cond(const GibbsState& s, const LCMConfig& c, const DesignCache& cache) {
  const Index p = c.p();
  if (p == 0) return CMcSpec{VectorXd(0), nullptr, VectorXd(0), VectorXd(0), c.kind()};
  const VectorXd a_prior = VectorXd::Constant(p, c.hyper.alpha_beta);
  const VectorXd k_prior = VectorXd::Constant(p, c.hyper.kappa_beta);
  auto bottom = [&](const VectorXd& d) -> VectorXd {
    return a_prior - c.hyper.sigma_beta * (c.X.transpose() * d);
  };
  const VectorXd d = resolve_d(a_prior, k_prior, cache.beta_bounds, c, cache.b, bottom);
  VectorXd offset = s.xi;
  if (c.r() > 0) offset.noalias() += c.Phi * s.eta;
  return make_cmc_spec(stack(-offset, VectorXd::Zero(p)), cache.beta_H, stack(c.Z + d, bottom(d)),
                       stack(cache.b, k_prior), c.kind(), "beta full conditional");
}

CMcSpec build_eta_cond(const GibbsState& s, const LCMConfig& c, const DesignCache& cache) {
  const Index r = c.r();
  if (r == 0) return CMcSpec{VectorXd(0), nullptr, VectorXd(0), VectorXd(0), c.kind()};
  const MatrixXd Vinv = s.vinv();
  const auto upper = Vinv.transpose().triangularView<Eigen::UnitUpper>();
  auto bottom = [&](const VectorXd& d) -> VectorXd {
    // alpha_eta - V' Phi' d with V' = (V^{-1}')^{-1}.
    return s.alpha_eta - upper.solve(VectorXd(c.Phi.transpose() * d));
  };
  BoundPair bounds;
  if (c.data_model.bounded_below()) {
    // Phi V with V = (V^{-1})^{-1}.
    bounds = column_bounds(upper.solve(c.Phi.transpose()).transpose());
  }
  const VectorXd d = resolve_d(s.alpha_eta, s.kappa_eta, bounds, c, cache.b, bottom);
  VectorXd offset = s.xi;
  if (c.p() > 0) offset.noalias() += c.X * s.beta;
  auto H = ProjectionDesign::stacked(cache.phi_block, Vinv, true);
  return make_cmc_spec(stack(-offset, VectorXd::Zero(r)), std::move(H), stack(c.Z + d, bottom(d)),
                       stack(cache.b, s.kappa_eta), c.kind(), "eta full conditional");
}

CMcSpec build_xi_cond(const GibbsState& s, const LCMConfig& c, const DesignCache& cache) {
  const Index n = c.n();
  const VectorXd a_prior = VectorXd::Constant(n, s.alpha_xi);
  const VectorXd k_prior = VectorXd::Constant(n, s.kappa_xi);
  auto bottom = [&](const VectorXd& d) -> VectorXd { return a_prior - d.cwiseQuotient(cache.xi_scale); };
  const VectorXd d = resolve_d(a_prior, k_prior, cache.xi_bounds, c, cache.b, bottom);
  VectorXd offset = VectorXd::Zero(n);
  if (c.p() > 0) offset.noalias() += c.X * s.beta;
  if (c.r() > 0) offset.noalias() += c.Phi * s.eta;
  return make_cmc_spec(stack(-offset, VectorXd::Zero(n)), cache.xi_H, stack(c.Z + d, bottom(d)),
                       stack(cache.b, k_prior), c.kind(), "xi full conditional");
}

CMcSpec build_v_cond(int i, const GibbsState& s, const LCMConfig& c) {
  const Index r = c.r();
  if (i < 2 || i > r) throw ValidationError("build_v_cond: row index must lie in 2..r");
  const Index m = i - 1;
  auto top = std::make_shared<const ProjectionDesign::Block>(MatrixXd(s.eta.head(m).transpose()));
  VectorXd mu = VectorXd::Zero(1 + m);
  mu[0] = -s.eta[m];
  VectorXd alpha(1 + m), kappa(1 + m);
  alpha << s.alpha_eta[m], VectorXd::Constant(m, c.hyper.alpha_v);
  kappa << s.kappa_eta[m], VectorXd::Constant(m, c.hyper.kappa_v);
  auto H = ProjectionDesign::stacked(std::move(top), MatrixXd::Identity(m, m) / c.hyper.sigma_v, true);
  return make_cmc_spec(std::move(mu), std::move(H), std::move(alpha), std::move(kappa), c.kind(),
                       "v row full conditional");
}

CMcSpec build_beta_cond(const GibbsState& s, const LCMConfig& c) { return build_beta_cond(s, c, make_design_cache(c)); }
CMcSpec build_eta_cond(const GibbsState& s, const LCMConfig& c) { return build_eta_cond(s, c, make_design_cache(c)); }
CMcSpec build_xi_cond(const GibbsState& s, const LCMConfig& c) { return build_xi_cond(s, c, make_design_cache(c)); }

}  // namespace lcm
