#pragma once

#include <Eigen/Dense>

#include "lcm/chain.hpp"
#include "lcm/model.hpp"
#include "lcm/samplers.hpp"

namespace lcm {

// Posterior mean of inverse_link(Y_i) over stored draws. Binomial gives t * p-hat.
Eigen::VectorXd predict_mean(const ChainOutput& chain, const LCMConfig& config);

struct HoldoutPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd rounded;  // rounded mean for count models, the mean otherwise
};

// Per stored draw: xi_new ~ DY(alpha_xi, kappa_xi), then inverse_link(x'beta + phi'eta + xi_new), averaged.
HoldoutPrediction predict_holdout(const ChainOutput& chain, const LCMConfig& config, const Eigen::MatrixXd& X_new,
                                  const Eigen::MatrixXd& Phi_new, RngStream& rng);

struct DicResult {
  double mean_deviance = 0.0;     // D-bar
  double deviance_at_mean = 0.0;  // D at the posterior-mean linear predictor
  double p_d = 0.0;
  double dic = 0.0;
};

double deviance(const Eigen::VectorXd& y, const LCMConfig& config);
DicResult dic_details(const ChainOutput& chain, const LCMConfig& config);
double dic(const ChainOutput& chain, const LCMConfig& config);

}  // namespace lcm
