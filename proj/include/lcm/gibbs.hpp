#pragma once

#include "lcm/chain.hpp"
#include "lcm/conditionals.hpp"
#include "lcm/model.hpp"
#include "lcm/samplers.hpp"

namespace lcm {

struct StepStats {
  long rejected_blocks = 0;  // block draws with non-finite entries, old value kept
  long slice_warnings = 0;
};

// Sufficient statistics of m iid DY draws s: (sum s, sum psi(s)).
struct DYSuffStats {
  double sum_s = 0.0;
  double sum_psi = 0.0;
  double m = 0.0;
};

// log of exp{(g1 + sum s) alpha + (g2 - sum psi(s)) kappa + (rho + m) log K(alpha, kappa)}; -inf when invalid.
double hyper_log_target(PartitionKind kind, double alpha, double kappa, std::array<double, 2> gamma, double rho,
                        const DYSuffStats& stats);

// One coordinate-wise slice sweep over the transformed (alpha, kappa):
// (log alpha, log kappa) for log-gamma and negative-inverse-gamma, (log alpha, log(kappa - alpha)) for
// logit-beta, log kappa with alpha held fixed for the quadratic kind. Returns the number of slice warnings.
int update_hyper_pair(PartitionKind kind, double& alpha, double& kappa, std::array<double, 2> gamma, double rho,
                      const DYSuffStats& stats, const McmcSettings& mcmc, RngStream& rng);

int update_hyper_eta(GibbsState& state, const LCMConfig& config, RngStream& rng);
int update_hyper_xi(GibbsState& state, const LCMConfig& config, RngStream& rng);

// One sweep: beta, eta, xi, v rows, (alpha_eta, kappa_eta), (alpha_xi, kappa_xi).
void gibbs_step(GibbsState& state, const LCMConfig& config, const DesignCache& cache, RngStream& rng,
                StepStats& stats);
GibbsState gibbs_step(const GibbsState& state, const LCMConfig& config, RngStream& rng);

// Validates the config (ValidationError); errors raised during a sweep are rethrown as RuntimeFailure.
ChainOutput run_chain(const LCMConfig& config, RngStream& rng);

}  // namespace lcm
