#pragma once

#include <memory>

#include "lcm/cm.hpp"
#include "lcm/model.hpp"

namespace lcm {

// Row-sum terms for the boundary vector d of a block with design A V:
// signed_sum = max_j |sum_i (A V)_ij|, abs_sum = max_j sum_i |(A V)_ij|.
struct BoundPair {
  double signed_sum = 0.0;
  double abs_sum = 0.0;
};
BoundPair column_bounds(const Eigen::MatrixXd& AV);

// Pieces of the block designs that do not change between sweeps.
struct DesignCache {
  std::shared_ptr<const ProjectionDesign> beta_H;  // [X; sigma_beta^{-1} I]
  std::shared_ptr<const ProjectionDesign> xi_H;    // [I; diag(xi_scale)]
  std::shared_ptr<const ProjectionDesign::Block> phi_block;
  Eigen::VectorXd b;        // per-observation b
  Eigen::VectorXd xi_scale;
  BoundPair beta_bounds;
  BoundPair xi_bounds;
};

DesignCache make_design_cache(const LCMConfig& config);

// Full conditionals in CM_c form. A block with no columns (p = 0 or r = 0) returns a spec whose H is null.
// Throws ValidationError naming the first invalid (alpha*, kappa*) index.
CMcSpec build_beta_cond(const GibbsState& state, const LCMConfig& config, const DesignCache& cache);
CMcSpec build_eta_cond(const GibbsState& state, const LCMConfig& config, const DesignCache& cache);
CMcSpec build_xi_cond(const GibbsState& state, const LCMConfig& config, const DesignCache& cache);
// Row i (1-based, 2..r) of V^{-1}.
CMcSpec build_v_cond(int i, const GibbsState& state, const LCMConfig& config);

CMcSpec build_beta_cond(const GibbsState& state, const LCMConfig& config);
CMcSpec build_eta_cond(const GibbsState& state, const LCMConfig& config);
CMcSpec build_xi_cond(const GibbsState& state, const LCMConfig& config);

}  // namespace lcm
