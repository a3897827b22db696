#pragma once

#include <optional>
#include <string>
#include <utility>

namespace lcm {

// Unit log partition functions.
//   NegInvGamma  psi(y) = log(-1/y), y < 0
//   LogitBeta    psi(y) = log(1 + e^y)
//   LogGamma     psi(y) = e^y
//   Quadratic    psi(y) = y^2
enum class PartitionKind { NegInvGamma, LogitBeta, LogGamma, Quadratic };

struct DYParams {
  double alpha = 0.0;
  double kappa = 0.0;
};

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

const char* kind_name(PartitionKind kind);

// Natural-parameter support membership.
bool in_support(PartitionKind kind, double y);

double psi_eval(PartitionKind kind, double y);

// (psi'(y), psi''(y)).
std::pair<double, double> psi_derivs(PartitionKind kind, double y);

// log K(alpha, kappa), the constant making K exp{alpha y - kappa psi(y)} integrate to one.
double log_K(PartitionKind kind, DYParams params);

Moments dy_moments(PartitionKind kind, DYParams params);

// First violated constraint, or nullopt when valid.
std::optional<std::string> validate(PartitionKind kind, DYParams params);

// Throws ValidationError with the violation text.
void require_valid(PartitionKind kind, DYParams params);

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

}  // namespace lcm
