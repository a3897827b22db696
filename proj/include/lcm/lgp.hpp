#pragma once

#include <optional>

#include <Eigen/Dense>

#include "lcm/chain.hpp"
#include "lcm/model.hpp"
#include "lcm/samplers.hpp"

namespace lcm {

// Latent Gaussian comparator: the same data layer with normal latent layers.
// beta_j ~ N(0, sigma_beta^2 / (2 kappa_beta)), v entries ~ N(0, sigma_v^2 / (2 kappa_v)),
// V^{-1} eta ~ N(0, diag(1 / (2 kappa_eta))), xi_scale * xi ~ N(0, 1 / (2 kappa_xi)),
// kappa ~ Gamma(rho / 2 + 1, rate -gamma2) for each kappa_eta_i and kappa_xi. Alpha hyperparameters are unused.
struct LGPConfig {
  Eigen::VectorXd Z;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Phi;
  DataModel data_model;
  HyperParams hyper = HyperParams::defaults(PartitionKind::Quadratic);
  McmcSettings mcmc;
  Eigen::VectorXd xi_scale;
  std::optional<GibbsState> init;

  Eigen::Index n() const { return Z.size(); }
  Eigen::Index p() const { return X.cols(); }
  Eigen::Index r() const { return Phi.cols(); }

  // Data, design, MCMC settings and xi scale from an LCM config; hyperparameters reset to the Gaussian defaults.
  static LGPConfig from_lcm(const LCMConfig& c);
  // The equivalent LCM view (for validation, prediction and DIC).
  LCMConfig as_lcm() const;
};

// theta = (beta, eta, xi, v entries row by row, log kappa_eta, log kappa_xi).
Eigen::Index lgp_theta_dim(Eigen::Index p, Eigen::Index r, Eigen::Index n);
Eigen::VectorXd lgp_theta_from_state(const GibbsState& state);
GibbsState lgp_state_from_theta(const Eigen::VectorXd& theta, Eigen::Index p, Eigen::Index r, Eigen::Index n);

// Log posterior density of theta up to the marginal likelihood, including the log-kappa Jacobians.
// -inf for non-finite entries. Throws ValidationError on a dimension mismatch.
double lgp_log_joint(const Eigen::VectorXd& theta, const LGPConfig& config);

// Coordinate-wise slice sampling (width mcmc.slice_width) over theta; warns on stderr when n > 500.
// mcmc.update_v and mcmc.update_hyper hold the v entries and the log kappas at their initial values when false.
ChainOutput lgp_run_chain(const LGPConfig& config, RngStream& rng);

}  // namespace lcm
