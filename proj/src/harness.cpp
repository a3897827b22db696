#include "lcm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "lcm/design.hpp"
#include "lcm/errors.hpp"
#include "lcm/gibbs.hpp"
#include "lcm/lgp.hpp"
#include "lcm/numeric.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const fs::path& dir, const std::string& file) { return (dir / file).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create output directory " + dir + ": " + ec.message());
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: field '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError("config: unknown field '" + it.key() + "' in " + where);
}

json hyper_json(const HyperParams& h) {
  return {{"alpha_beta", h.alpha_beta}, {"kappa_beta", h.kappa_beta}, {"alpha_v", h.alpha_v},
          {"kappa_v", h.kappa_v},       {"sigma_beta", h.sigma_beta}, {"sigma_v", h.sigma_v},
          {"gamma_eta", h.gamma_eta},   {"rho_eta", h.rho_eta},       {"gamma_xi", h.gamma_xi},
          {"rho_xi", h.rho_xi}};
}

HyperParams hyper_from(const json& j, HyperParams h) {
  check_keys(j, {"alpha_beta", "kappa_beta", "alpha_v", "kappa_v", "sigma_beta", "sigma_v", "gamma_eta", "rho_eta",
                 "gamma_xi", "rho_xi"},
             "hyper");
  auto set = [&](const char* k, double& field) {
    if (j.contains(k)) field = get<double>(j, k);
  };
  auto set2 = [&](const char* k, std::array<double, 2>& field) {
    if (j.contains(k)) field = get<std::array<double, 2>>(j, k);
  };
  set("alpha_beta", h.alpha_beta);
  set("kappa_beta", h.kappa_beta);
  set("alpha_v", h.alpha_v);
  set("kappa_v", h.kappa_v);
  set("sigma_beta", h.sigma_beta);
  set("sigma_v", h.sigma_v);
  set2("gamma_eta", h.gamma_eta);
  set("rho_eta", h.rho_eta);
  set2("gamma_xi", h.gamma_xi);
  set("rho_xi", h.rho_xi);
  return h;
}

json mcmc_json(const McmcSettings& m) {
  return {{"burnin", m.burnin},       {"iters", m.iters},           {"thin", m.thin},
          {"update_v", m.update_v},   {"update_hyper", m.update_hyper}, {"store_xi", m.store_xi},
          {"slice_width", m.slice_width}, {"slice_max_steps", m.slice_max_steps}};
}

McmcSettings mcmc_from(const json& j, McmcSettings m) {
  check_keys(j, {"burnin", "iters", "thin", "update_v", "update_hyper", "store_xi", "slice_width", "slice_max_steps"},
             "mcmc");
  if (j.contains("burnin")) m.burnin = get<int>(j, "burnin");
  if (j.contains("iters")) m.iters = get<int>(j, "iters");
  if (j.contains("thin")) m.thin = get<int>(j, "thin");
  if (j.contains("update_v")) m.update_v = get<bool>(j, "update_v");
  if (j.contains("update_hyper")) m.update_hyper = get<bool>(j, "update_hyper");
  if (j.contains("store_xi")) m.store_xi = get<bool>(j, "store_xi");
  if (j.contains("slice_width")) m.slice_width = get<double>(j, "slice_width");
  if (j.contains("slice_max_steps")) m.slice_max_steps = get<int>(j, "slice_max_steps");
  return m;
}

// Columns of a table whose names start with prefix followed by 1, 2, ... in order.
MatrixXd numbered_columns(const NumericTable& t, const std::string& prefix, const std::string& path) {
  std::vector<Index> cols;
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    if (t.names[j] == prefix + std::to_string(cols.size() + 1)) cols.push_back(static_cast<Index>(j));
  }
  for (const std::string& nm : t.names) {
    if (nm.rfind(prefix, 0) == 0 && nm.size() > prefix.size() &&
        std::all_of(nm.begin() + static_cast<long>(prefix.size()), nm.end(), ::isdigit)) {
      const int k = std::stoi(nm.substr(prefix.size()));
      if (k < 1 || k > static_cast<int>(cols.size()))
        throw ValidationError(path + ": line 1: columns " + prefix + "1.." + prefix + "k must be consecutive");
    }
  }
  MatrixXd m(t.values.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Index>(k)) = t.values.col(cols[k]);
  return m;
}

Index find_column(const NumericTable& t, const std::string& name) {
  for (std::size_t j = 0; j < t.names.size(); ++j)
    if (t.names[j] == name) return static_cast<Index>(j);
  return -1;
}

void write_spec(const ExperimentSpec& spec) {
  ensure_dir(spec.out);
  std::ofstream f(join(spec.out, "run.json"));
  if (!f) throw RuntimeFailure("cannot write " + join(spec.out, "run.json"));
  f << to_json(spec).dump(2) << '\n';
}

void write_timing(const ExperimentSpec& spec, const json& timing) {
  std::ofstream f(join(spec.out, "timing.json"));
  f << timing.dump(2) << '\n';
}

LCMConfig base_config(const ExperimentSpec& spec) {
  LCMConfig c;
  c.data_model = spec.data_model();
  c.hyper = spec.hyper_or_default();
  c.mcmc = spec.mcmc;
  c.mcmc.seed = spec.seed;
  return c;
}

// Truth on the tspe scale for the simulated design.
VectorXd sim_truth(const SimDesign& d, const DataModel& m) {
  if (m.family == Family::Binomial) return d.p;
  return (d.p.array() / (1.0 - d.p.array())).matrix();
}

VectorXd estimate_for_tspe(const ChainOutput& chain, const LCMConfig& c) {
  VectorXd est = predict_mean(chain, c);
  if (c.data_model.family == Family::Binomial) est /= c.data_model.t;
  return est;
}

}  // namespace

DataModel ExperimentSpec::data_model() const { return DataModel::parse(model, t); }

HyperParams ExperimentSpec::hyper_or_default() const {
  return hyper ? *hyper : HyperParams::defaults(data_model().kind());
}

json to_json(const ExperimentSpec& s) {
  json j = {{"kind", s.kind},   {"model", s.model},     {"n", s.n},
            {"p", s.p},         {"r", s.r},             {"t", s.t},
            {"reps", s.reps},   {"seed", s.seed},       {"threads", s.threads},
            {"mcmc", mcmc_json(s.mcmc)}, {"hyper", hyper_json(s.hyper_or_default())},
            {"csv", s.csv},     {"chain", s.chain},     {"holdout", s.holdout},
            {"r_sweep", s.r_sweep}, {"out", s.out}};
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  check_keys(j, {"kind", "model", "n", "p", "r", "t", "reps", "seed", "threads", "mcmc", "hyper", "csv", "chain",
                 "holdout", "r_sweep", "out"},
             "config");
  ExperimentSpec s;
  if (j.contains("kind")) s.kind = get<std::string>(j, "kind");
  if (j.contains("model")) s.model = get<std::string>(j, "model");
  if (j.contains("n")) s.n = get<int>(j, "n");
  if (j.contains("p")) s.p = get<int>(j, "p");
  if (j.contains("r")) s.r = get<int>(j, "r");
  if (j.contains("t")) s.t = get<int>(j, "t");
  if (j.contains("reps")) s.reps = get<int>(j, "reps");
  if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("threads")) s.threads = get<int>(j, "threads");
  if (j.contains("mcmc")) s.mcmc = mcmc_from(j.at("mcmc"), s.mcmc);
  if (j.contains("hyper")) s.hyper = hyper_from(j.at("hyper"), HyperParams::defaults(s.data_model().kind()));
  if (j.contains("csv")) s.csv = get<std::string>(j, "csv");
  if (j.contains("chain")) s.chain = get<std::string>(j, "chain");
  if (j.contains("holdout")) s.holdout = get<std::string>(j, "holdout");
  if (j.contains("r_sweep")) s.r_sweep = get<std::vector<int>>(j, "r_sweep");
  if (j.contains("out")) s.out = get<std::string>(j, "out");
  return s;
}

ExperimentSpec read_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return spec_from_json(j);
}

double tspe(const DataModel& model, const VectorXd& truth, const VectorXd& estimate) {
  if (truth.size() != estimate.size()) throw ValidationError("tspe: truth and estimate lengths differ");
  const double scale = model.family == Family::Binomial ? model.t : 1.0;
  double total = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    const double e = scale * (truth[i] - estimate[i]);
    total += e * e;
  }
  return total;
}

std::vector<ReplicateResult> compare_experiment(const ExperimentSpec& spec) {
  if (spec.reps < 1) throw ValidationError("compare: reps must be >= 1");
  const DataModel model = spec.data_model();
  if (model.family != Family::Binomial && model.family != Family::NegBinomial)
    throw ValidationError("compare: model must be binomial or negbinomial");
  std::vector<ReplicateResult> rows(static_cast<std::size_t>(spec.reps));
  const RngStream root(spec.seed);

  auto run_one = [&](int k) {
    ReplicateResult& row = rows[static_cast<std::size_t>(k)];
    row.replicate = k + 1;
    const auto base = static_cast<std::uint64_t>(3 * k);
    RngStream design_rng = root.substream(base), lcm_rng = root.substream(base + 1),
              lgp_rng = root.substream(base + 2);
    try {
      const SimDesign d = gen_sim_design(spec.n, spec.p, spec.r, spec.t, design_rng);
      LCMConfig c = base_config(spec);
      c.X = d.X;
      c.Phi = d.Phi;
      c.Z = model.family == Family::Binomial ? d.Z_binomial : d.Z_negbinomial;
      const VectorXd truth = sim_truth(d, model);

      auto t0 = std::chrono::steady_clock::now();
      const ChainOutput lgp = lgp_run_chain(LGPConfig::from_lcm(c), lgp_rng);
      row.lgp_seconds = seconds_since(t0);
      row.tspe_lgp = tspe(model, truth, estimate_for_tspe(lgp, c));

      t0 = std::chrono::steady_clock::now();
      const ChainOutput lcm = run_chain(c, lcm_rng);
      row.lcm_seconds = seconds_since(t0);
      row.tspe_lcm = tspe(model, truth, estimate_for_tspe(lcm, c));
      row.log_ratio = std::log(row.tspe_lgp) - std::log(row.tspe_lcm);
      row.ok = std::isfinite(row.log_ratio);
      if (!row.ok) row.error = "non-finite TSPE";
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.log_ratio = std::numeric_limits<double>::quiet_NaN();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min(spec.reps, spec.threads > 0 ? spec.threads : static_cast<int>(hw));
  if (workers <= 1) {
    for (int k = 0; k < spec.reps; ++k) run_one(k);
    return rows;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < spec.reps; k = next++) run_one(k);
    });
  }
  for (std::thread& th : pool) th.join();
  return rows;
}

double median_log_ratio(const std::vector<ReplicateResult>& rows) {
  if (rows.empty()) throw ValidationError("median_log_ratio: no replicates");
  std::vector<double> v;
  for (const ReplicateResult& r : rows) v.push_back(r.ok ? r.log_ratio : -std::numeric_limits<double>::infinity());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

BigNResult big_n_experiment(const ExperimentSpec& spec) {
  const DataModel model = spec.data_model();
  if (model.family != Family::Binomial && model.family != Family::NegBinomial)
    throw ValidationError("bign: model must be binomial or negbinomial");
  const RngStream root(spec.seed);
  RngStream design_rng = root.substream(0), chain_rng = root.substream(1);
  const SimDesign d = gen_sim_design(spec.n, spec.p, spec.r, spec.t, design_rng);
  LCMConfig c = base_config(spec);
  c.mcmc.store_xi = false;
  c.X = d.X;
  c.Phi = d.Phi;
  c.Z = model.family == Family::Binomial ? d.Z_binomial : d.Z_negbinomial;

  BigNResult res;
  res.n = spec.n;
  const auto t0 = std::chrono::steady_clock::now();
  const ChainOutput chain = run_chain(c, chain_rng);
  res.runtime_seconds = seconds_since(t0);
  const double scale = model.family == Family::Binomial ? model.t : 1.0;
  res.truth = scale * sim_truth(d, model);
  res.estimate = scale * estimate_for_tspe(chain, c);
  res.Z = c.Z;
  res.tspe_model = tspe(model, sim_truth(d, model), estimate_for_tspe(chain, c));
  // Raw-data estimate Z / t: the sample proportion, or the moment estimate of the odds (E Z = t * odds).
  const VectorXd raw = c.Z / model.t;
  res.tspe_raw = tspe(model, sim_truth(d, model), raw);
  res.ratio = res.tspe_model / res.tspe_raw;
  const VectorXd sq = (res.truth - res.estimate).array().square();
  res.frac_below_one = static_cast<double>((sq.array() < 1.0).count()) / static_cast<double>(sq.size());
  return res;
}

PoissonDesign gen_poisson_design(int n, int p, int r, std::uint64_t seed) {
  if (n < 1 || p < 1 || r < 0 || r > n - p) throw ValidationError("gen_poisson_design: need n >= 1, 1 <= p, r <= n - p");
  RngStream rng(seed);
  PoissonDesign d;
  d.X.resize(n, p);
  d.X.col(0).setOnes();
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < p; ++j) d.X(i, j) = rng.normal();
  d.Phi = moran_basis(d.X, r);
  d.beta.resize(p);
  d.beta[0] = -0.5;
  for (int j = 1; j < p; ++j) d.beta[j] = 0.25 * rng.normal();
  // Phi has unit-norm columns, so coefficients scale with sqrt(n) to give O(1) effects per row.
  d.eta.resize(r);
  for (int k = 0; k < r; ++k) d.eta[k] = 0.5 * std::sqrt(static_cast<double>(n)) * rng.normal();
  d.xi.resize(n);
  for (int i = 0; i < n; ++i) d.xi[i] = 0.1 * rng.normal();
  d.mean = (d.X * d.beta + d.Phi * d.eta + d.xi).array().exp();
  d.Z.resize(n);
  for (int i = 0; i < n; ++i) d.Z[i] = static_cast<double>(sample_poisson(d.mean[i], rng));
  return d;
}

FitResult fit_command(const ExperimentSpec& spec) {
  if (spec.csv.empty()) throw ValidationError("fit: no data CSV given");
  const NumericTable t = read_numeric_csv(spec.csv);
  if (t.values.rows() == 0) throw ValidationError(spec.csv + ": line 2: no data rows");
  const Index zc = find_column(t, "z");
  if (zc < 0) throw ValidationError(spec.csv + ": line 1: missing column 'z'");
  const MatrixXd Xall = numbered_columns(t, "x", spec.csv);
  const Index hc = find_column(t, "holdout");
  std::vector<Index> train, held;
  for (Index i = 0; i < t.values.rows(); ++i) {
    const bool h = hc >= 0 && t.values(i, hc) != 0.0;
    (h ? held : train).push_back(i);
  }
  if (train.empty()) throw ValidationError(spec.csv + ": every row is flagged as hold-out");

  FitResult res;
  res.holdout_rows = static_cast<Index>(held.size());
  ensure_dir(spec.out);

  auto fit_rank = [&](int r, std::uint64_t stream) {
    const MatrixXd Phi_all = moran_basis(Xall, r);
    LCMConfig c = base_config(spec);
    const Index m = static_cast<Index>(train.size());
    c.X.resize(m, Xall.cols());
    c.Phi.resize(m, r);
    c.Z.resize(m);
    for (Index k = 0; k < m; ++k) {
      c.X.row(k) = Xall.row(train[static_cast<std::size_t>(k)]);
      c.Phi.row(k) = Phi_all.row(train[static_cast<std::size_t>(k)]);
      c.Z[k] = t.values(train[static_cast<std::size_t>(k)], zc);
    }
    RngStream rng = RngStream(spec.seed).substream(stream);
    ChainOutput chain = run_chain(c, rng);
    return std::make_tuple(c, std::move(chain), Phi_all);
  };

  auto [config, chain, Phi_all] = fit_rank(spec.r, 0);
  res.config = config;
  res.chain = std::move(chain);
  res.dic_by_r.emplace_back(spec.r, dic_details(res.chain, res.config));
  write_draws_csv(join(spec.out, "draws.csv"), res.chain);
  write_summary_csv(join(spec.out, "summary.csv"), res.chain);

  for (std::size_t k = 0; k < spec.r_sweep.size(); ++k) {
    const int r = spec.r_sweep[k];
    auto [c, ch, unused] = fit_rank(r, k + 1);
    res.dic_by_r.emplace_back(r, dic_details(ch, c));
  }
  {
    MatrixXd rows(static_cast<Index>(res.dic_by_r.size()), 5);
    for (std::size_t k = 0; k < res.dic_by_r.size(); ++k) {
      const DicResult& d = res.dic_by_r[k].second;
      rows.row(static_cast<Index>(k)) << res.dic_by_r[k].first, d.dic, d.p_d, d.mean_deviance, d.deviance_at_mean;
    }
    write_csv(join(spec.out, "dic.csv"), {"r", "dic", "p_d", "mean_deviance", "deviance_at_mean"}, rows);
  }
  if (!held.empty()) {
    const Index p = Xall.cols(), r = Phi_all.cols();
    std::vector<std::string> names{"z"};
    for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    for (Index j = 0; j < r; ++j) names.push_back("phi" + std::to_string(j + 1));
    MatrixXd rows(static_cast<Index>(held.size()), 1 + p + r);
    for (std::size_t k = 0; k < held.size(); ++k) {
      const Index i = held[k];
      rows(static_cast<Index>(k), 0) = t.values(i, zc);
      rows.row(static_cast<Index>(k)).segment(1, p) = Xall.row(i);
      rows.row(static_cast<Index>(k)).segment(1 + p, r) = Phi_all.row(i);
    }
    write_csv(join(spec.out, "holdout.csv"), names, rows);
  }
  return res;
}

PredictResult predict_command(const ExperimentSpec& spec) {
  if (spec.chain.empty() || spec.holdout.empty()) throw ValidationError("predict: need a chain CSV and a hold-out CSV");
  const fs::path sidecar = fs::path(spec.chain).parent_path() / "run.json";
  if (!fs::exists(spec.chain)) throw ValidationError("predict: chain file not found: " + spec.chain);
  if (!fs::exists(spec.holdout)) throw ValidationError("predict: hold-out file not found: " + spec.holdout);
  if (!fs::exists(sidecar)) throw ValidationError("predict: missing " + sidecar.string() + " next to the chain");
  const ExperimentSpec fit_spec = read_spec(sidecar.string());
  const ChainOutput chain = read_draws_csv(spec.chain);
  const NumericTable t = read_numeric_csv(spec.holdout);
  const MatrixXd Xn = numbered_columns(t, "x", spec.holdout);
  const MatrixXd Pn = numbered_columns(t, "phi", spec.holdout);
  if (Xn.cols() != chain.p || Pn.cols() != chain.r) {
    throw ValidationError("predict: hold-out has " + std::to_string(Xn.cols()) + " x and " +
                          std::to_string(Pn.cols()) + " phi columns; the chain has p=" + std::to_string(chain.p) +
                          ", r=" + std::to_string(chain.r));
  }
  LCMConfig c;
  c.data_model = fit_spec.data_model();
  c.hyper = fit_spec.hyper_or_default();
  RngStream rng(spec.seed);
  PredictResult res;
  res.prediction = predict_holdout(chain, c, Xn, Pn, rng);
  const Index zc = find_column(t, "z");
  const Index m = Xn.rows();
  std::vector<std::string> names{"row", "mean", "rounded"};
  MatrixXd rows(m, zc >= 0 ? 4 : 3);
  for (Index i = 0; i < m; ++i) {
    rows(i, 0) = static_cast<double>(i + 1);
    rows(i, 1) = res.prediction.mean[i];
    rows(i, 2) = res.prediction.rounded[i];
  }
  if (zc >= 0) {
    res.truth = t.values.col(zc);
    names.push_back("truth");
    rows.col(3) = *res.truth;
    Index exact = 0, within = 0;
    for (Index i = 0; i < m; ++i) {
      const double e = std::fabs(res.prediction.rounded[i] - (*res.truth)[i]);
      exact += e == 0.0 ? 1 : 0;
      within += e <= 1.0 ? 1 : 0;
    }
    res.frac_exact = m ? static_cast<double>(exact) / m : 0.0;
    res.frac_within_one = m ? static_cast<double>(within) / m : 0.0;
  }
  ensure_dir(spec.out);
  write_csv(join(spec.out, "predictions.csv"), names, rows);
  if (zc >= 0) {
    MatrixXd s(1, 3);
    s << static_cast<double>(m), res.frac_exact, res.frac_within_one;
    write_csv(join(spec.out, "predict_summary.csv"), {"rows", "frac_exact", "frac_within_one"}, s);
  }
  return res;
}

void write_csv(const std::string& path, const std::vector<std::string>& names, const MatrixXd& values) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < names.size(); ++j) f << (j ? "," : "") << names[j];
  f << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) f << (j ? "," : "") << num(values(i, j));
    f << '\n';
  }
  if (!f) throw RuntimeFailure("write failed: " + path);
}

void run_experiment(const ExperimentSpec& spec) {
  write_spec(spec);
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.kind == "simulate") {
    std::vector<std::string> names{"z"};
    MatrixXd rows;
    const DataModel model = spec.data_model();
    if (model.family == Family::Poisson) {
      const PoissonDesign d = gen_poisson_design(spec.n, spec.p, spec.r, spec.seed);
      for (int j = 0; j < spec.p; ++j) names.push_back("x" + std::to_string(j + 1));
      names.push_back("truth");
      rows.resize(spec.n, spec.p + 2);
      rows << d.Z, d.X, d.mean;
    } else if (model.family == Family::Binomial || model.family == Family::NegBinomial) {
      RngStream rng = RngStream(spec.seed).substream(0);
      const SimDesign d = gen_sim_design(spec.n, spec.p, spec.r, spec.t, rng);
      for (int j = 0; j < spec.p; ++j) names.push_back("x" + std::to_string(j + 1));
      for (int j = 0; j < spec.r; ++j) names.push_back("phi" + std::to_string(j + 1));
      names.push_back("truth");
      rows.resize(spec.n, 2 + spec.p + spec.r);
      rows << (model.family == Family::Binomial ? d.Z_binomial : d.Z_negbinomial), d.X, d.Phi, sim_truth(d, model);
    } else {
      throw ValidationError("simulate: model must be poisson, binomial or negbinomial");
    }
    write_csv(join(spec.out, "design.csv"), names, rows);
  } else if (spec.kind == "compare") {
    const std::vector<ReplicateResult> res = compare_experiment(spec);
    std::ofstream f(join(spec.out, "compare.csv"));
    f << "replicate,status,tspe_lcm,tspe_lgp,log_ratio,message\n";
    json timing = json::array();
    for (const ReplicateResult& r : res) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      f << r.replicate << ',' << (r.ok ? "ok" : "failed") << ',' << num(r.tspe_lcm) << ',' << num(r.tspe_lgp) << ','
        << num(r.log_ratio) << ',' << msg << '\n';
      timing.push_back({{"replicate", r.replicate}, {"lcm_seconds", r.lcm_seconds}, {"lgp_seconds", r.lgp_seconds}});
    }
    std::printf("median log TSPE ratio (LGP/LCM): %.6g\n", median_log_ratio(res));
    write_timing(spec, {{"replicates", timing}, {"total_seconds", seconds_since(t0)}});
  } else if (spec.kind == "bign") {
    const BigNResult r = big_n_experiment(spec);
    MatrixXd s(1, 5);
    s << static_cast<double>(r.n), r.tspe_model, r.tspe_raw, r.ratio, r.frac_below_one;
    write_csv(join(spec.out, "bign.csv"), {"n", "tspe_model", "tspe_raw", "ratio", "frac_below_one"}, s);
    MatrixXd per(r.truth.size(), 4);
    per << r.truth, r.estimate, r.Z, (r.truth - r.estimate).array().square().matrix();
    write_csv(join(spec.out, "bign_errors.csv"), {"truth", "estimate", "z", "sq_error"}, per);
    std::printf("TSPE model/raw = %.6g, share of squared errors below 1 = %.4f\n", r.ratio, r.frac_below_one);
    write_timing(spec, {{"chain_seconds", r.runtime_seconds}, {"total_seconds", seconds_since(t0)}});
  } else if (spec.kind == "fit") {
    const FitResult r = fit_command(spec);
    for (const auto& [rank, d] : r.dic_by_r) std::printf("r=%d DIC=%.6f\n", rank, d.dic);
    write_timing(spec, {{"chain_seconds", r.chain.wall_seconds}, {"total_seconds", seconds_since(t0)}});
  } else if (spec.kind == "predict") {
    const PredictResult r = predict_command(spec);
    if (r.truth) std::printf("exact: %.4f within one: %.4f\n", r.frac_exact, r.frac_within_one);
  } else if (spec.kind == "basis") {
    if (spec.csv.empty()) throw ValidationError("basis: no covariate CSV given");
    const NumericTable t = read_numeric_csv(spec.csv);
    const MatrixXd phi = moran_basis(t.values, spec.r);
    std::vector<std::string> names;
    for (int j = 0; j < spec.r; ++j) names.push_back("phi" + std::to_string(j + 1));
    write_csv(join(spec.out, "basis.csv"), names, phi);
  } else {
    throw ValidationError("unknown experiment kind '" + spec.kind + "'");
  }
}

}  // namespace lcm
