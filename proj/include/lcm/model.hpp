#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcm/partition.hpp"

namespace lcm {

enum class Family { Poisson, Binomial, NegBinomial, Gaussian };

// Exponential-family data layer f(Z|Y) = exp{ZY - b psi(Y) + c(Z)}.
struct DataModel {
  Family family = Family::Poisson;
  int t = 1;  // trials (Binomial) or successes (NegBinomial)

  static DataModel poisson() { return {Family::Poisson, 1}; }
  static DataModel binomial(int t) { return {Family::Binomial, t}; }
  static DataModel negbinomial(int t) { return {Family::NegBinomial, t}; }
  static DataModel gaussian() { return {Family::Gaussian, 1}; }
  // "poisson", "binomial", "negbinomial", "gaussian".
  static DataModel parse(const std::string& name, int t);

  PartitionKind kind() const;
  std::string name() const;
  double b(double z) const;
  bool in_data_support(double z) const;
  bool bounded_below() const { return family != Family::Gaussian; }
  bool bounded_above() const { return family == Family::Binomial; }
  // Mean-scale summary of Y: exp (Poisson), t*logistic (Binomial), odds exp (NegBinomial), Y (Gaussian).
  double inverse_link(double y) const;
};

// Full log pmf/pdf including c(Z). Throws std::domain_error when Z is outside the data support.
double data_log_pmf(const DataModel& model, double z, double y);

// Boundary adjustment d = m_a/(m_a+S) e0(Z) - m_b/(m_b+S) eb(Z),
// m_a = min(alpha), m_b = min(kappa - alpha).
Eigen::VectorXd boundary_d(const Eigen::VectorXd& alpha, const Eigen::VectorXd& kappa, double row_sum_bound,
                           const Eigen::VectorXd& Z, const DataModel& model);

struct HyperParams {
  double alpha_beta = 500.0;
  double kappa_beta = 500.0;
  double alpha_v = 500.0;
  double kappa_v = 500.0;
  double sigma_beta = 100.0;
  double sigma_v = 100.0;
  std::array<double, 2> gamma_eta{0.0, -1.0};
  double rho_eta = 1.0;
  std::array<double, 2> gamma_xi{0.0, -1.0};
  double rho_xi = 1.0;

  static HyperParams defaults(PartitionKind kind);
  // Propriety of the (alpha, kappa) hyperpriors and validity of the fixed CM priors.
  void validate(PartitionKind kind) const;
};

struct McmcSettings {
  int burnin = 1000;
  int iters = 4000;
  int thin = 1;
  std::uint64_t seed = 1;
  bool update_v = true;
  bool update_hyper = true;
  bool store_xi = true;
  double slice_width = 1.0;
  int slice_max_steps = 100;
};

struct GibbsState {
  Eigen::VectorXd beta;
  Eigen::VectorXd eta;
  Eigen::VectorXd xi;
  // v_rows[k] holds the k sub-diagonal entries of row k (0-based) of V^{-1}; v_rows[0] is empty.
  std::vector<Eigen::VectorXd> v_rows;
  Eigen::VectorXd alpha_eta;
  Eigen::VectorXd kappa_eta;
  double alpha_xi = 1.0;
  double kappa_xi = 1.0;

  // Lower unit triangular V^{-1}.
  Eigen::MatrixXd vinv() const;
  // Neutral interior start: zeros and kind-specific (alpha, kappa).
  static GibbsState initial(Eigen::Index p, Eigen::Index r, Eigen::Index n, PartitionKind kind);
};

struct LCMConfig {
  Eigen::VectorXd Z;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Phi;
  DataModel data_model;
  HyperParams hyper;
  McmcSettings mcmc;
  // Diagonal of V_xi^{-1}; empty means identity.
  Eigen::VectorXd xi_scale;
  std::optional<GibbsState> init;

  Eigen::Index n() const { return Z.size(); }
  Eigen::Index p() const { return X.cols(); }
  Eigen::Index r() const { return Phi.cols(); }
  PartitionKind kind() const { return data_model.kind(); }
  Eigen::VectorXd xi_scale_or_ones() const;
};

void validate_config(const LCMConfig& config);
void validate_state(const GibbsState& state, const LCMConfig& config);

// Linear predictor X beta + Phi eta + xi.
Eigen::VectorXd linear_predictor(const GibbsState& state, const LCMConfig& config);

}  // namespace lcm
