#include "lcm/partition.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "lcm/errors.hpp"
#include "lcm/numeric.hpp"

namespace lcm {

const char* kind_name(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::NegInvGamma: return "neg_inv_gamma";
    case PartitionKind::LogitBeta: return "logit_beta";
    case PartitionKind::LogGamma: return "log_gamma";
    case PartitionKind::Quadratic: return "quadratic";
  }
  return "unknown";
}

bool in_support(PartitionKind kind, double y) {
  if (!std::isfinite(y)) return false;
  return kind != PartitionKind::NegInvGamma || y < 0.0;
}

double psi_eval(PartitionKind kind, double y) {
  if (!in_support(kind, y)) throw std::domain_error("psi_eval: y outside natural-parameter support");
  switch (kind) {
    case PartitionKind::NegInvGamma: return -std::log(-y);
    case PartitionKind::LogitBeta: return log1pexp(y);
    case PartitionKind::LogGamma: return std::exp(y);
    case PartitionKind::Quadratic: return y * y;
  }
  return 0.0;
}

std::pair<double, double> psi_derivs(PartitionKind kind, double y) {
  if (!in_support(kind, y)) throw std::domain_error("psi_derivs: y outside natural-parameter support");
  switch (kind) {
    case PartitionKind::NegInvGamma: return {-1.0 / y, 1.0 / (y * y)};
    case PartitionKind::LogitBeta: {
      const double s = logistic(y);
      return {s, s * (1.0 - s)};
    }
    case PartitionKind::LogGamma: {
      const double e = std::exp(y);
      return {e, e};
    }
    case PartitionKind::Quadratic: return {2.0 * y, 2.0};
  }
  return {0.0, 0.0};
}

std::optional<std::string> validate(PartitionKind kind, DYParams p) {
  const double a = p.alpha, k = p.kappa;
  if (std::isnan(a) || std::isnan(k)) return "requires finite alpha and kappa";
  switch (kind) {
    case PartitionKind::NegInvGamma:
    case PartitionKind::LogGamma:
      if (!(a > 0.0)) return "requires α > 0";
      if (!(k > 0.0)) return "requires κ > 0";
      if (!std::isfinite(a) || !std::isfinite(k)) return "requires finite alpha and kappa";
      return std::nullopt;
    case PartitionKind::LogitBeta:
      if (!(a > 0.0)) return "requires α > 0";
      if (!std::isfinite(k)) return "requires finite alpha and kappa";
      if (!(a < k)) return "requires α < κ";
      return std::nullopt;
    case PartitionKind::Quadratic:
      if (!std::isfinite(a)) return "requires finite α";
      if (!(k > 0.0) || !std::isfinite(k)) return "requires κ > 0";
      return std::nullopt;
  }
  return "unknown kind";
}

void require_valid(PartitionKind kind, DYParams params) {
  if (auto v = validate(kind, params)) {
    throw ValidationError(std::string(kind_name(kind)) + " DY parameters: " + *v);
  }
}

double log_K(PartitionKind kind, DYParams p) {
  require_valid(kind, p);
  const double a = p.alpha, k = p.kappa;
  switch (kind) {
    case PartitionKind::NegInvGamma: return (k + 1.0) * std::log(a) - log_gamma(k + 1.0);
    case PartitionKind::LogitBeta: return log_gamma(k) - log_gamma(a) - log_gamma(k - a);
    case PartitionKind::LogGamma: return a * std::log(k) - log_gamma(a);
    case PartitionKind::Quadratic: return 0.5 * std::log(k / std::numbers::pi) - a * a / (4.0 * k);
  }
  return 0.0;
}

Moments dy_moments(PartitionKind kind, DYParams p) {
  require_valid(kind, p);
  const double a = p.alpha, k = p.kappa;
  switch (kind) {
    case PartitionKind::NegInvGamma: return {-(k + 1.0) / a, (k + 1.0) / (a * a)};
    case PartitionKind::LogitBeta: return {digamma(a) - digamma(k - a), trigamma(a) + trigamma(k - a)};
    case PartitionKind::LogGamma: return {digamma(a) - std::log(k), trigamma(a)};
    case PartitionKind::Quadratic: return {a / (2.0 * k), 1.0 / (2.0 * k)};
  }
  return {};
}

double log_gamma(double x) {
  if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(x)) return x;
  return boost::math::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::digamma(x);
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::trigamma(x);
}

}  // namespace lcm
