#include "lcm/predict.hpp"

#include <cmath>

#include "lcm/dy.hpp"
#include "lcm/errors.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd predict_mean(const ChainOutput& chain, const LCMConfig& c) {
  if (chain.stored() == 0) throw ValidationError("predict_mean: empty chain");
  if (chain.n != c.n()) throw ValidationError("predict_mean: chain and config disagree on n");
  if (!chain.has_xi) return chain.fit.sum_response / static_cast<double>(chain.fit.count);
  VectorXd acc = VectorXd::Zero(c.n());
  for (Index k = 0; k < chain.stored(); ++k) {
    const VectorXd y = linear_predictor(chain.state_at(k), c);
    for (Index i = 0; i < y.size(); ++i) acc[i] += c.data_model.inverse_link(y[i]);
  }
  return acc / static_cast<double>(chain.stored());
}

HoldoutPrediction predict_holdout(const ChainOutput& chain, const LCMConfig& c, const MatrixXd& X_new,
                                  const MatrixXd& Phi_new, RngStream& rng) {
  if (chain.stored() == 0) throw ValidationError("predict_holdout: empty chain");
  if (X_new.cols() != chain.p || Phi_new.cols() != chain.r || X_new.rows() != Phi_new.rows()) {
    throw ValidationError("predict_holdout: X_new/Phi_new dimensions do not match the chain");
  }
  const PartitionKind kind = c.kind();
  const Index m = X_new.rows();
  VectorXd acc = VectorXd::Zero(m);
  for (Index k = 0; k < chain.stored(); ++k) {
    const GibbsState s = chain.state_at(k);
    VectorXd y = VectorXd::Zero(m);
    if (chain.p > 0) y.noalias() += X_new * s.beta;
    if (chain.r > 0) y.noalias() += Phi_new * s.eta;
    for (Index i = 0; i < m; ++i) {
      const double xi_new = dy_sample(kind, {s.alpha_xi, s.kappa_xi}, rng);
      acc[i] += c.data_model.inverse_link(y[i] + xi_new);
    }
  }
  HoldoutPrediction out;
  out.mean = acc / static_cast<double>(chain.stored());
  out.rounded = c.data_model.family == Family::Gaussian ? out.mean : VectorXd(out.mean.array().round());
  return out;
}

double deviance(const VectorXd& y, const LCMConfig& c) {
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i) total += data_log_pmf(c.data_model, c.Z[i], y[i]);
  return -2.0 * total;
}

DicResult dic_details(const ChainOutput& chain, const LCMConfig& c) {
  if (chain.fit.count == 0) throw ValidationError("dic: empty chain");
  DicResult r;
  const double m = static_cast<double>(chain.fit.count);
  r.mean_deviance = chain.fit.sum_deviance / m;
  r.deviance_at_mean = deviance(chain.fit.sum_predictor / m, c);
  r.p_d = r.mean_deviance - r.deviance_at_mean;
  r.dic = r.mean_deviance + r.p_d;
  return r;
}

double dic(const ChainOutput& chain, const LCMConfig& c) { return dic_details(chain, c).dic; }

}  // namespace lcm
