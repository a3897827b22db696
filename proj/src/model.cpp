#include "lcm/model.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "lcm/errors.hpp"
#include "lcm/numeric.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool is_count(double z) { return std::isfinite(z) && z >= 0.0 && z == std::floor(z); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

DataModel DataModel::parse(const std::string& name, int t) {
  if (name == "poisson") return poisson();
  if (name == "gaussian") return gaussian();
  if (name == "binomial" || name == "negbinomial") {
    if (t < 1) throw ValidationError("data model " + name + " requires t >= 1");
    return name == "binomial" ? binomial(t) : negbinomial(t);
  }
  if (name == "gamma") throw ValidationError("gamma data model is not supported by the Gibbs sampler");
  throw ValidationError("unknown data model '" + name + "'");
}

PartitionKind DataModel::kind() const {
  switch (family) {
    case Family::Poisson: return PartitionKind::LogGamma;
    case Family::Binomial:
    case Family::NegBinomial: return PartitionKind::LogitBeta;
    case Family::Gaussian: return PartitionKind::Quadratic;
  }
  return PartitionKind::Quadratic;
}

std::string DataModel::name() const {
  switch (family) {
    case Family::Poisson: return "poisson";
    case Family::Binomial: return "binomial";
    case Family::NegBinomial: return "negbinomial";
    case Family::Gaussian: return "gaussian";
  }
  return "?";
}

double DataModel::b(double z) const {
  switch (family) {
    case Family::Poisson: return 1.0;
    case Family::Binomial: return t;
    case Family::NegBinomial: return t + z;
    case Family::Gaussian: return 0.5;
  }
  return 1.0;
}

bool DataModel::in_data_support(double z) const {
  switch (family) {
    case Family::Poisson:
    case Family::NegBinomial: return is_count(z);
    case Family::Binomial: return is_count(z) && z <= t;
    case Family::Gaussian: return std::isfinite(z);
  }
  return false;
}

double DataModel::inverse_link(double y) const {
  switch (family) {
    case Family::Poisson:
    case Family::NegBinomial: return std::exp(y);
    case Family::Binomial: return t * logistic(y);
    case Family::Gaussian: return y;
  }
  return y;
}

double data_log_pmf(const DataModel& model, double z, double y) {
  if (!model.in_data_support(z)) {
    throw std::domain_error("data_log_pmf: Z=" + fmt(z) + " outside the " + model.name() + " support");
  }
  switch (model.family) {
    case Family::Poisson: return z * y - std::exp(y) - std::lgamma(z + 1.0);
    case Family::Binomial:
      return std::lgamma(model.t + 1.0) - std::lgamma(z + 1.0) - std::lgamma(model.t - z + 1.0) + z * y -
             model.t * log1pexp(y);
    case Family::NegBinomial:
      return std::lgamma(z + model.t) - std::lgamma(z + 1.0) - std::lgamma(static_cast<double>(model.t)) + z * y -
             (model.t + z) * log1pexp(y);
    case Family::Gaussian: return z * y - 0.5 * y * y - 0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return 0.0;
}

VectorXd boundary_d(const VectorXd& alpha, const VectorXd& kappa, double row_sum_bound, const VectorXd& Z,
                    const DataModel& model) {
  VectorXd d = VectorXd::Zero(Z.size());
  if (alpha.size() == 0) return d;
  if (model.bounded_below()) {
    const double m = alpha.minCoeff();
    const double c = m / (m + row_sum_bound);
    for (Index i = 0; i < Z.size(); ++i)
      if (Z[i] == 0.0) d[i] += c;
  }
  if (model.bounded_above()) {
    const double m = (kappa - alpha).minCoeff();
    const double c = m / (m + row_sum_bound);
    for (Index i = 0; i < Z.size(); ++i)
      if (Z[i] == model.t) d[i] -= c;
  }
  return d;
}

HyperParams HyperParams::defaults(PartitionKind kind) {
  HyperParams h;
  switch (kind) {
    case PartitionKind::LogGamma:
      // One pseudo-observation at y = +-1; the printed (1000, -1e-15) pair is improper.
      h.gamma_eta = h.gamma_xi = {0.0, -std::cosh(1.0)};
      h.rho_eta = h.rho_xi = 1.0;
      break;
    case PartitionKind::LogitBeta:
      // alpha < kappa is required; (500, 1000) is the symmetric choice.
      // Hyperprior: one pseudo-observation at y = +-1, as for log-gamma. gamma2 = -1000 drives kappa to ~1e-3.
      h.kappa_beta = h.kappa_v = 1000.0;
      h.gamma_eta = h.gamma_xi = {0.0, -0.5 * (log1pexp(1.0) + log1pexp(-1.0))};
      h.rho_eta = h.rho_xi = 1.0;
      break;
    case PartitionKind::Quadratic:
      h.alpha_beta = h.alpha_v = 0.0;
      h.gamma_eta = h.gamma_xi = {0.0, -0.5};
      h.rho_eta = h.rho_xi = 2.0;
      break;
    case PartitionKind::NegInvGamma:
      // One pseudo-observation split between y = -1/2 and y = -2.
      h.gamma_eta = h.gamma_xi = {-1.25, 0.0};
      h.rho_eta = h.rho_xi = 1.0;
      break;
  }
  return h;
}

namespace {

// (g1/rho, g2/rho) must lie inside the convex hull of {(y, -psi(y))}.
std::optional<std::string> hyperprior_problem(PartitionKind kind, std::array<double, 2> g, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) return "requires rho > 0";
  if (!std::isfinite(g[0]) || !std::isfinite(g[1])) return "requires finite gamma";
  const double a = g[0] / rho, b = g[1] / rho;
  bool ok = false;
  switch (kind) {
    case PartitionKind::NegInvGamma: ok = a < 0.0 && b < std::log(-a); break;
    case PartitionKind::LogitBeta: ok = b < -log1pexp(a); break;
    case PartitionKind::LogGamma: ok = b < -std::exp(a); break;
    case PartitionKind::Quadratic: ok = b < -a * a; break;
  }
  if (!ok) return "improper: (gamma1/rho, gamma2/rho) outside the mean-value region";
  return std::nullopt;
}

}  // namespace

void HyperParams::validate(PartitionKind kind) const {
  if (!(sigma_beta > 0.0) || !(sigma_v > 0.0)) throw ValidationError("hyper: sigma_beta and sigma_v must be > 0");
  if (auto v = lcm::validate(kind, {alpha_beta, kappa_beta}))
    throw ValidationError("hyper: (alpha_beta, kappa_beta) " + *v);
  if (auto v = lcm::validate(kind, {alpha_v, kappa_v})) throw ValidationError("hyper: (alpha_v, kappa_v) " + *v);
  if (auto v = hyperprior_problem(kind, gamma_eta, rho_eta)) throw ValidationError("hyper: eta hyperprior " + *v);
  if (auto v = hyperprior_problem(kind, gamma_xi, rho_xi)) throw ValidationError("hyper: xi hyperprior " + *v);
}

MatrixXd GibbsState::vinv() const {
  const Index r = eta.size();
  MatrixXd m = MatrixXd::Identity(r, r);
  for (Index k = 1; k < r && k < static_cast<Index>(v_rows.size()); ++k) m.row(k).head(k) = v_rows[k].transpose();
  return m;
}

GibbsState GibbsState::initial(Index p, Index r, Index n, PartitionKind kind) {
  GibbsState s;
  s.beta = VectorXd::Zero(p);
  s.eta = VectorXd::Zero(r);
  s.xi = VectorXd::Zero(n);
  s.v_rows.resize(r);
  for (Index k = 0; k < r; ++k) s.v_rows[k] = VectorXd::Zero(k);
  double a = 1.0, k = 1.0;
  if (kind == PartitionKind::LogitBeta) k = 2.0;
  if (kind == PartitionKind::Quadratic) a = 0.0, k = 0.5;
  s.alpha_eta = VectorXd::Constant(r, a);
  s.kappa_eta = VectorXd::Constant(r, k);
  s.alpha_xi = a;
  s.kappa_xi = k;
  return s;
}

VectorXd LCMConfig::xi_scale_or_ones() const { return xi_scale.size() == 0 ? VectorXd::Ones(n()) : xi_scale; }

void validate_config(const LCMConfig& c) {
  const Index n = c.n();
  if (n < 1) throw ValidationError("config: n must be >= 1");
  if (c.X.rows() != n) throw ValidationError("config: X has " + std::to_string(c.X.rows()) + " rows, expected " +
                                             std::to_string(n));
  if (c.Phi.rows() != n) throw ValidationError("config: Phi has " + std::to_string(c.Phi.rows()) +
                                               " rows, expected " + std::to_string(n));
  if (!c.X.allFinite() || !c.Phi.allFinite()) throw ValidationError("config: X and Phi must be finite");
  for (Index i = 0; i < n; ++i) {
    if (!c.data_model.in_data_support(c.Z[i])) {
      throw ValidationError("config: Z[" + std::to_string(i) + "]=" + fmt(c.Z[i]) + " outside the " +
                            c.data_model.name() + " support");
    }
  }
  if (c.data_model.family != Family::Gaussian && c.data_model.t < 1) throw ValidationError("config: t must be >= 1");
  c.hyper.validate(c.kind());
  if (c.xi_scale.size() != 0) {
    if (c.xi_scale.size() != n) throw ValidationError("config: xi_scale length must equal n");
    if (!(c.xi_scale.array() > 0.0).all() || !c.xi_scale.allFinite())
      throw ValidationError("config: xi_scale entries must be positive");
  }
  const McmcSettings& m = c.mcmc;
  if (m.burnin < 0 || m.iters < 0 || m.thin < 1) throw ValidationError("config: need burnin >= 0, iters >= 0, thin >= 1");
  if (!(m.slice_width > 0.0) || m.slice_max_steps < 1) throw ValidationError("config: invalid slice settings");
  if (c.init) validate_state(*c.init, c);
}

void validate_state(const GibbsState& s, const LCMConfig& c) {
  const Index p = c.p(), r = c.r(), n = c.n();
  if (s.beta.size() != p || s.eta.size() != r || s.xi.size() != n || s.alpha_eta.size() != r ||
      s.kappa_eta.size() != r || static_cast<Index>(s.v_rows.size()) != r) {
    throw ValidationError("state: dimensions do not match the config");
  }
  for (Index k = 0; k < r; ++k)
    if (s.v_rows[k].size() != k) throw ValidationError("state: v row " + std::to_string(k + 1) + " has wrong length");
  const PartitionKind kind = c.kind();
  for (Index k = 0; k < r; ++k) {
    if (auto v = validate(kind, {s.alpha_eta[k], s.kappa_eta[k]}))
      throw ValidationError("state: (alpha_eta, kappa_eta)[" + std::to_string(k) + "] " + *v);
  }
  if (auto v = validate(kind, {s.alpha_xi, s.kappa_xi})) throw ValidationError("state: (alpha_xi, kappa_xi) " + *v);
}

VectorXd linear_predictor(const GibbsState& s, const LCMConfig& c) {
  VectorXd y = s.xi;
  if (c.p() > 0) y.noalias() += c.X * s.beta;
  if (c.r() > 0) y.noalias() += c.Phi * s.eta;
  return y;
}

}  // namespace lcm
