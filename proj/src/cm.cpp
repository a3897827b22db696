#include "lcm/cm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "lcm/dy.hpp"
#include "lcm/errors.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kRankTol = 1e-10;

void check_pairs(const VectorXd& alpha, const VectorXd& kappa, PartitionKind kind, const char* label) {
  for (Index i = 0; i < alpha.size(); ++i) {
    if (auto v = validate(kind, {alpha[i], kappa[i]})) {
      throw ValidationError(std::string(label) + ": DY pair at index " + std::to_string(i) + " invalid (" + *v +
                            ", alpha=" + std::to_string(alpha[i]) + ", kappa=" + std::to_string(kappa[i]) + ")");
    }
  }
}

VectorXd apply_V(const CMParams& p, const VectorXd& w) {
  if (p.lower_unit) return p.Vinv.triangularView<Eigen::UnitLower>().solve(w);
  return p.Vinv.partialPivLu().solve(w);
}

double log_abs_det(const CMParams& p) {
  if (p.lower_unit) return 0.0;
  const Eigen::PartialPivLU<MatrixXd> lu(p.Vinv);
  return lu.matrixLU().diagonal().array().abs().log().sum();
}

}  // namespace

void validate_cm(const CMParams& p) {
  const Index n = p.mu.size();
  if (p.Vinv.rows() != n || p.Vinv.cols() != n || p.alpha.size() != n || p.kappa.size() != n) {
    throw ValidationError("CM parameters: dimension mismatch");
  }
  check_pairs(p.alpha, p.kappa, p.kind, "CM parameters");
  if (p.lower_unit) {
    for (Index i = 0; i < n; ++i) {
      if (p.Vinv(i, i) != 1.0) throw ValidationError("CM parameters: Vinv flagged unit triangular has diagonal != 1");
      for (Index j = i + 1; j < n; ++j) {
        if (p.Vinv(i, j) != 0.0) throw ValidationError("CM parameters: Vinv flagged lower triangular has upper entries");
      }
    }
  } else if (n > 0) {
    const Eigen::FullPivLU<MatrixXd> lu(p.Vinv);
    if (!lu.isInvertible()) throw ValidationError("CM parameters: Vinv is singular");
  }
}

VectorXd cm_sample(const CMParams& p, RngStream& rng) {
  validate_cm(p);
  VectorXd w(p.mu.size());
  for (Index i = 0; i < w.size(); ++i) w[i] = dy_sample_unchecked(p.kind, p.alpha[i], p.kappa[i], rng);
  return p.mu + apply_V(p, w);
}

double cm_logpdf(const CMParams& p, const VectorXd& y) {
  validate_cm(p);
  if (y.size() != p.mu.size()) throw ValidationError("cm_logpdf: dimension mismatch");
  const VectorXd s = p.Vinv * (y - p.mu);
  double total = log_abs_det(p);
  for (Index i = 0; i < s.size(); ++i) {
    if (!in_support(p.kind, s[i])) return -std::numeric_limits<double>::infinity();
    total += log_K(p.kind, {p.alpha[i], p.kappa[i]}) + p.alpha[i] * s[i] - p.kappa[i] * psi_eval(p.kind, s[i]);
  }
  return total;
}

MomentPair cm_moments(const CMParams& p) {
  validate_cm(p);
  const Index n = p.mu.size();
  VectorXd k(n), K(n);
  for (Index i = 0; i < n; ++i) {
    const Moments m = dy_moments(p.kind, {p.alpha[i], p.kappa[i]});
    k[i] = m.mean;
    K[i] = m.var;
  }
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd V = p.lower_unit ? MatrixXd(p.Vinv.triangularView<Eigen::UnitLower>().solve(I))
                                  : MatrixXd(p.Vinv.partialPivLu().inverse());
  return {p.mu + V * k, V * K.asDiagonal() * V.transpose()};
}

ProjectionDesign::Block::Block(MatrixXd m) : M(std::move(m)), gram(M.transpose() * M) {}

std::shared_ptr<const ProjectionDesign> ProjectionDesign::dense(const MatrixXd& H) {
  return stacked(std::make_shared<const Block>(H), MatrixXd(0, H.cols()));
}

std::shared_ptr<const ProjectionDesign> ProjectionDesign::stacked(std::shared_ptr<const Block> top, MatrixXd bottom,
                                                                 bool bottom_full_rank) {
  if (!top) throw ValidationError("projection design: missing top block");
  if (bottom.cols() != top->M.cols()) throw ValidationError("projection design: block column mismatch");
  std::shared_ptr<ProjectionDesign> d(new ProjectionDesign());
  d->top_ = std::move(top);
  d->bottom_ = std::move(bottom);
  d->factor(d->top_->gram + d->bottom_.transpose() * d->bottom_, bottom_full_rank);
  return d;
}

std::shared_ptr<const ProjectionDesign> ProjectionDesign::identity_over_diagonal(VectorXd dvec) {
  std::shared_ptr<ProjectionDesign> d(new ProjectionDesign());
  d->identity_top_ = true;
  d->gram_diag_ = (1.0 + dvec.array().square()).matrix();
  d->diag_ = std::move(dvec);
  return d;
}

void ProjectionDesign::factor(const MatrixXd& gram, bool trusted) {
  if (gram.rows() == 0) return;
  llt_.compute(gram);
  if (llt_.info() != Eigen::Success) throw ValidationError("projection design: H is rank deficient");
  if (trusted) return;
  const VectorXd diag = llt_.matrixLLT().diagonal().cwiseAbs();
  if (!(diag.minCoeff() >= kRankTol * diag.maxCoeff())) {
    throw ValidationError("projection design: H is rank deficient");
  }
}

Index ProjectionDesign::rows() const { return top_rows() + (identity_top_ ? diag_.size() : bottom_.rows()); }
Index ProjectionDesign::cols() const { return identity_top_ ? diag_.size() : top_->M.cols(); }
Index ProjectionDesign::top_rows() const { return identity_top_ ? diag_.size() : top_->M.rows(); }

VectorXd ProjectionDesign::multiply(const VectorXd& q) const {
  VectorXd out(rows());
  const Index t = top_rows();
  if (identity_top_) {
    out.head(t) = q;
    out.tail(diag_.size()) = diag_.cwiseProduct(q);
  } else {
    out.head(t).noalias() = top_->M * q;
    out.tail(bottom_.rows()).noalias() = bottom_ * q;
  }
  return out;
}

VectorXd ProjectionDesign::transpose_multiply(const VectorXd& w) const {
  const Index t = top_rows();
  if (identity_top_) return w.head(t) + diag_.cwiseProduct(w.tail(diag_.size()));
  VectorXd out = top_->M.transpose() * w.head(t);
  out.noalias() += bottom_.transpose() * w.tail(bottom_.rows());
  return out;
}

VectorXd ProjectionDesign::solve_normal(const VectorXd& v) const {
  if (identity_top_) return v.cwiseQuotient(gram_diag_);
  if (v.size() == 0) return v;
  return llt_.solve(v);
}

MatrixXd ProjectionDesign::weighted_cross(const VectorXd& weights) const {
  const Index t = top_rows();
  if (identity_top_) {
    return (weights.head(t) + diag_.cwiseProduct(diag_).cwiseProduct(weights.tail(diag_.size()))).asDiagonal();
  }
  return top_->M.transpose() * weights.head(t).asDiagonal() * top_->M +
         bottom_.transpose() * weights.tail(bottom_.rows()).asDiagonal() * bottom_;
}

MatrixXd ProjectionDesign::gram_inverse() const {
  if (identity_top_) return gram_diag_.cwiseInverse().asDiagonal();
  return llt_.solve(MatrixXd::Identity(cols(), cols()));
}

MatrixXd ProjectionDesign::to_dense() const {
  MatrixXd H(rows(), cols());
  for (Index j = 0; j < cols(); ++j) H.col(j) = multiply(VectorXd::Unit(cols(), j));
  return H;
}

CMcSpec make_cmc_spec(VectorXd mu_star, std::shared_ptr<const ProjectionDesign> H, VectorXd alpha, VectorXd kappa,
                      PartitionKind kind, const char* label) {
  if (!H) throw ValidationError(std::string(label) + ": missing design");
  const Index n = H->rows();
  if (mu_star.size() != n || alpha.size() != n || kappa.size() != n) {
    throw ValidationError(std::string(label) + ": dimension mismatch");
  }
  check_pairs(alpha, kappa, kind, label);
  return CMcSpec{std::move(mu_star), std::move(H), std::move(alpha), std::move(kappa), kind};
}

double cmc_logpdf_unnorm(const CMcSpec& spec, const VectorXd& y1) {
  if (y1.size() != spec.H->cols()) throw ValidationError("cmc_logpdf_unnorm: dimension mismatch");
  const VectorXd hy = spec.H->multiply(y1);
  double total = 0.0;
  for (Index i = 0; i < hy.size(); ++i) {
    const double s = hy[i] - spec.mu_star[i];
    if (!in_support(spec.kind, s)) return -std::numeric_limits<double>::infinity();
    total += spec.alpha[i] * hy[i] - spec.kappa[i] * psi_eval(spec.kind, s);
  }
  return total;
}

VectorXd cmc_sample(const CMcSpec& spec, RngStream& rng) {
  VectorXd w(spec.mu_star.size());
  for (Index i = 0; i < w.size(); ++i) {
    w[i] = spec.mu_star[i] + dy_sample_unchecked(spec.kind, spec.alpha[i], spec.kappa[i], rng);
  }
  return spec.H->solve_normal(spec.H->transpose_multiply(w));
}

MomentPair cmc_moments(const CMcSpec& spec) {
  const Index n = spec.mu_star.size();
  VectorXd k(n), K(n);
  for (Index i = 0; i < n; ++i) {
    const Moments m = dy_moments(spec.kind, {spec.alpha[i], spec.kappa[i]});
    k[i] = m.mean;
    K[i] = m.var;
  }
  const MatrixXd ginv = spec.H->gram_inverse();
  const VectorXd mean = spec.H->solve_normal(spec.H->transpose_multiply(spec.mu_star + k));
  const MatrixXd cov = ginv * spec.H->weighted_cross(K) * ginv;
  return {mean, cov};
}

CMParams gaussian_limit(PartitionKind kind, const VectorXd& mu, const MatrixXd& V, double alpha) {
  if (kind == PartitionKind::NegInvGamma) {
    throw ValidationError("gaussian_limit: psi1 has no limit (psi1'(0) diverges)");
  }
  if (kind == PartitionKind::Quadratic) throw ValidationError("gaussian_limit: psi4 is already Gaussian");
  if (!(alpha > 0.0)) throw ValidationError("gaussian_limit: alpha must be positive");
  if (V.rows() != mu.size() || V.cols() != mu.size()) throw ValidationError("gaussian_limit: dimension mismatch");
  const auto [d1, d2] = psi_derivs(kind, 0.0);
  const double scale = std::sqrt(d2 / d1) * std::sqrt(alpha);
  CMParams p;
  p.mu = mu;
  p.Vinv = (scale * V).inverse();
  p.alpha = VectorXd::Constant(mu.size(), alpha);
  p.kappa = VectorXd::Constant(mu.size(), alpha / d1);
  p.kind = kind;
  validate_cm(p);
  return p;
}

}  // namespace lcm
