#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcm/model.hpp"

namespace lcm {

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double rhat = 1.0;  // split-chain potential scale reduction; NaN with fewer than 4 draws
};

// Running means over stored draws, kept even when xi is not stored.
struct FitAccumulator {
  long count = 0;
  Eigen::VectorXd sum_predictor;  // sum of Y
  Eigen::VectorXd sum_response;   // sum of inverse_link(Y)
  double sum_deviance = 0.0;      // sum of -2 sum_i log f(Z_i | Y_i)

  void add(const Eigen::VectorXd& y, const DataModel& model, const Eigen::VectorXd& Z);
  void merge(const FitAccumulator& other);
};

struct ChainOutput {
  std::vector<std::string> names;
  Eigen::MatrixXd draws;  // one row per stored sweep
  std::vector<ParamSummary> summaries;
  FitAccumulator fit;
  Eigen::Index p = 0, r = 0, n = 0;
  bool has_xi = false;
  double wall_seconds = 0.0;
  long rejected_blocks = 0;
  long slice_warnings = 0;
  GibbsState final_state;

  Eigen::Index stored() const { return draws.rows(); }
  // Column index of a named parameter; -1 when absent.
  Eigen::Index column(const std::string& name) const;
  Eigen::VectorXd posterior_mean() const;
  // Rebuilds the sampled state of one stored row (v_rows, hyper values included; xi zero when not stored).
  GibbsState state_at(Eigen::Index row) const;
};

// Column names in storage order: beta_j, eta_j, xi_i, v_i_j, alpha_eta_i, kappa_eta_i, alpha_xi, kappa_xi.
std::vector<std::string> state_names(Eigen::Index p, Eigen::Index r, Eigen::Index n, bool with_xi);
Eigen::VectorXd flatten_state(const GibbsState& state, bool with_xi);

double split_rhat(const Eigen::VectorXd& trace);
void summarize(ChainOutput& chain);

// Concatenates the draws of two chains over the same parameters; accumulators add.
ChainOutput merge_chains(const ChainOutput& a, const ChainOutput& b);

// Header plus one row per draw, %.17g.
void write_draws_csv(const std::string& path, const ChainOutput& chain);
void write_summary_csv(const std::string& path, const ChainOutput& chain);
struct NumericTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};
// Header row plus numeric rows. Errors name the file, line and column.
NumericTable read_numeric_csv(const std::string& path);

// Reads names and draws back; throws ValidationError on malformed input.
ChainOutput read_draws_csv(const std::string& path);

}  // namespace lcm
