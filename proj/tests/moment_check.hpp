#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace testutil {

struct MomentCheck {
  double worst_mean_z = 0.0;
  double worst_cov_z = 0.0;
  bool ok(double z) const { return worst_mean_z < z && worst_cov_z < z; }
};

// Draws in rows. Compares sample mean/covariance with targets in units of MC standard error.
inline MomentCheck compare_moments(const Eigen::MatrixXd& draws, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const double n = static_cast<double>(draws.rows());
  const Eigen::RowVectorXd m = draws.colwise().mean();
  const Eigen::MatrixXd c = draws.rowwise() - m;
  MomentCheck out;
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    const double sd = std::sqrt(c.col(j).squaredNorm() / (n - 1));
    out.worst_mean_z = std::max(out.worst_mean_z, std::fabs(m[j] - mean[j]) / (sd / std::sqrt(n)));
    for (Eigen::Index k = 0; k <= j; ++k) {
      const Eigen::ArrayXd prod = c.col(j).array() * c.col(k).array();
      const double est = prod.mean();
      const double se = std::sqrt((prod - est).square().sum() / (n - 1) / n);
      out.worst_cov_z = std::max(out.worst_cov_z, std::fabs(est - cov(j, k)) / se);
    }
  }
  return out;
}

inline Eigen::MatrixXd collect(int n, Eigen::Index dim, const std::function<Eigen::VectorXd()>& draw) {
  Eigen::MatrixXd out(n, dim);
  for (int i = 0; i < n; ++i) out.row(i) = draw().transpose();
  return out;
}

}  // namespace testutil
