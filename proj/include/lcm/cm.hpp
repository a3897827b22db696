#pragma once

#include <memory>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "lcm/partition.hpp"
#include "lcm/samplers.hpp"

namespace lcm {

// Y = mu + V w with w_i ~ DY(alpha_i, kappa_i; psi) independent. V is held through its inverse.
struct CMParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd Vinv;
  Eigen::VectorXd alpha;
  Eigen::VectorXd kappa;
  PartitionKind kind = PartitionKind::Quadratic;
  // Vinv is lower unit triangular: enables triangular solves and log det = 0.
  bool lower_unit = false;
};

struct MomentPair {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

void validate_cm(const CMParams& params);
Eigen::VectorXd cm_sample(const CMParams& params, RngStream& rng);
double cm_logpdf(const CMParams& params, const Eigen::VectorXd& y);
MomentPair cm_moments(const CMParams& params);

// Column-full-rank H = [top; bottom] with (H'H) factored once at construction.
// The top block may be shared between designs (its cross-product is cached with it),
// or be the identity with a diagonal bottom block, in which case H'H is diagonal.
class ProjectionDesign {
 public:
  struct Block {
    explicit Block(Eigen::MatrixXd m);
    Eigen::MatrixXd M;
    Eigen::MatrixXd gram;
  };

  static std::shared_ptr<const ProjectionDesign> dense(const Eigen::MatrixXd& H);
  // bottom_full_rank: the bottom block alone has full column rank (e.g. a scaled identity or unit triangular),
  // so only a failed factorization is an error; ill-conditioning is accepted.
  static std::shared_ptr<const ProjectionDesign> stacked(std::shared_ptr<const Block> top, Eigen::MatrixXd bottom,
                                                         bool bottom_full_rank = false);
  // H = [I_n; diag(d)].
  static std::shared_ptr<const ProjectionDesign> identity_over_diagonal(Eigen::VectorXd d);

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  Eigen::Index top_rows() const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& q) const;
  Eigen::VectorXd transpose_multiply(const Eigen::VectorXd& w) const;
  // (H'H)^{-1} v
  Eigen::VectorXd solve_normal(const Eigen::VectorXd& v) const;
  // H' diag(weights) H
  Eigen::MatrixXd weighted_cross(const Eigen::VectorXd& weights) const;
  Eigen::MatrixXd gram_inverse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  ProjectionDesign() = default;
  void factor(const Eigen::MatrixXd& gram, bool trusted);

  bool identity_top_ = false;
  std::shared_ptr<const Block> top_;
  Eigen::MatrixXd bottom_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd gram_diag_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// CM_c(mu*, H, alpha, kappa; psi): density proportional to exp{alpha' H y - kappa' psi(H y - mu*)}.
struct CMcSpec {
  Eigen::VectorXd mu_star;
  std::shared_ptr<const ProjectionDesign> H;
  Eigen::VectorXd alpha;
  Eigen::VectorXd kappa;
  PartitionKind kind = PartitionKind::Quadratic;
};

// Checks dimensions and every (alpha_i, kappa_i); the error names the first bad index.
CMcSpec make_cmc_spec(Eigen::VectorXd mu_star, std::shared_ptr<const ProjectionDesign> H, Eigen::VectorXd alpha,
                      Eigen::VectorXd kappa, PartitionKind kind, const char* label = "CM_c");

double cmc_logpdf_unnorm(const CMcSpec& spec, const Eigen::VectorXd& y1);
// q = (H'H)^{-1} H'(mu* + w), w_i ~ DY(alpha_i, kappa_i).
Eigen::VectorXd cmc_sample(const CMcSpec& spec, RngStream& rng);
MomentPair cmc_moments(const CMcSpec& spec);

// CM whose law tends to N(mu, V V') as alpha grows (psi2 and psi3 only).
CMParams gaussian_limit(PartitionKind kind, const Eigen::VectorXd& mu, const Eigen::MatrixXd& V, double alpha);

}  // namespace lcm
