#include "lcm/dy.hpp"

#include <cmath>
#include <limits>

namespace lcm {

double dy_sample_unchecked(PartitionKind kind, double alpha, double kappa, RngStream& rng) {
  switch (kind) {
    case PartitionKind::NegInvGamma: {
      // Y = -W, W ~ Gamma(kappa + 1, scale 1/alpha).
      double y;
      do {
        y = -std::exp(sample_log_gamma(kappa + 1.0, alpha, rng));
      } while (!(y < 0.0));
      return y;
    }
    case PartitionKind::LogitBeta: return sample_logit_beta(alpha, kappa - alpha, rng);
    case PartitionKind::LogGamma: return sample_log_gamma(alpha, kappa, rng);
    case PartitionKind::Quadratic: return alpha / (2.0 * kappa) + std::sqrt(0.5 / kappa) * rng.normal();
  }
  return 0.0;
}

double dy_sample(PartitionKind kind, DYParams params, RngStream& rng) {
  require_valid(kind, params);
  return dy_sample_unchecked(kind, params.alpha, params.kappa, rng);
}

double dy_logpdf(PartitionKind kind, DYParams params, double y) {
  const double lk = log_K(kind, params);
  if (!in_support(kind, y)) return -std::numeric_limits<double>::infinity();
  return lk + params.alpha * y - params.kappa * psi_eval(kind, y);
}

}  // namespace lcm
