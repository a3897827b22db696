#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lcm/chain.hpp"
#include "lcm/model.hpp"
#include "lcm/predict.hpp"

namespace lcm {

// Everything needed to re-run one CLI invocation. Serialized as the JSON sidecar.
struct ExperimentSpec {
  std::string kind = "compare";  // simulate, compare, bign, fit, predict, basis
  std::string model = "binomial";
  int n = 30, p = 3, r = 10, t = 10;
  int reps = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: one per hardware thread
  McmcSettings mcmc;
  std::optional<HyperParams> hyper;  // absent: defaults for the model's kind
  std::string csv;                   // fit: data (z, x1..xp[, holdout]); basis: covariates
  std::string chain;                 // predict: draws CSV written by fit
  std::string holdout;               // predict: rows with x1..xp, phi1..phir[, z]
  std::vector<int> r_sweep;          // fit: extra ranks to score by DIC
  std::string out = ".";

  DataModel data_model() const;
  HyperParams hyper_or_default() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
// Unknown keys and wrong types are ValidationErrors.
ExperimentSpec spec_from_json(const nlohmann::json& j);
ExperimentSpec read_spec(const std::string& path);

// Binomial: truth and estimate are probabilities, error on the t * p scale. Negative binomial: odds.
// Poisson and Gaussian: means.
double tspe(const DataModel& model, const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate);

struct ReplicateResult {
  int replicate = 0;
  bool ok = false;
  std::string error;
  double tspe_lcm = 0.0, tspe_lgp = 0.0;
  double log_ratio = 0.0;  // log TSPE(LGP) - log TSPE(LCM)
  double lcm_seconds = 0.0, lgp_seconds = 0.0;
};

// One row per replicate: fresh simulated design, LCM and LGP fits. Replicates run on a worker pool over
// independent substreams, so the table does not depend on the thread count. Failures are recorded, not thrown.
std::vector<ReplicateResult> compare_experiment(const ExperimentSpec& spec);
// Median log ratio with failed replicates counted as -inf (the LCM produced no estimate).
double median_log_ratio(const std::vector<ReplicateResult>& rows);

struct BigNResult {
  long n = 0;
  double tspe_model = 0.0, tspe_raw = 0.0, ratio = 0.0;
  double frac_below_one = 0.0;  // share of per-observation squared errors below 1
  double runtime_seconds = 0.0;
  Eigen::VectorXd truth, estimate, Z;  // on the t * p (or odds) scale
};

// Single LCM fit without stored xi draws.
BigNResult big_n_experiment(const ExperimentSpec& spec);

// Synthetic count design for the hold-out workflow: intercept plus standard normal covariates,
// Moran basis Phi, Poisson counts with a small mean.
struct PoissonDesign {
  Eigen::MatrixXd X, Phi;
  Eigen::VectorXd beta, eta, xi, mean, Z;
};
PoissonDesign gen_poisson_design(int n, int p, int r, std::uint64_t seed);

struct FitResult {
  LCMConfig config;
  ChainOutput chain;
  std::vector<std::pair<int, DicResult>> dic_by_r;  // fitted rank first, then the sweep
  Eigen::Index holdout_rows = 0;
};

// Reads spec.csv, builds the Moran basis, fits, writes draws.csv, summary.csv, dic.csv and holdout.csv
// (rows flagged by a `holdout` column, with their basis rows) into spec.out.
FitResult fit_command(const ExperimentSpec& spec);

struct PredictResult {
  HoldoutPrediction prediction;
  std::optional<Eigen::VectorXd> truth;
  double frac_exact = 0.0, frac_within_one = 0.0;
};

// Reads spec.chain and the run.json beside it, predicts spec.holdout, writes predictions.csv.
PredictResult predict_command(const ExperimentSpec& spec);

// Runs the experiment named by spec.kind, writing run.json and the CSV outputs into spec.out.
void run_experiment(const ExperimentSpec& spec);

void write_csv(const std::string& path, const std::vector<std::string>& names, const Eigen::MatrixXd& values);

}  // namespace lcm
