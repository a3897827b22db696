#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "lcm/errors.hpp"
#include "lcm/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string model;
  int n = 0, p = 0, r = 0, t = 0, reps = 0, burnin = 0, iters = 0, thin = 0, threads = 0;
  std::uint64_t seed = 0;
  std::string out, csv, chain, holdout;
  std::vector<int> r_sweep;
  bool fixed_v = false, fixed_hyper = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config (same schema as run.json); flags override it");
  cmd->add_option("--model", f.model, "data model")->check(CLI::IsMember({"poisson", "binomial", "negbinomial", "gaussian"}));
  cmd->add_option("--n", f.n, "observations");
  cmd->add_option("--p", f.p, "covariates");
  cmd->add_option("--r", f.r, "basis functions");
  cmd->add_option("--t", f.t, "binomial trials / negative binomial size");
  cmd->add_option("--reps", f.reps, "replicates");
  cmd->add_option("--burnin", f.burnin, "burn-in sweeps");
  cmd->add_option("--iters", f.iters, "stored-phase sweeps");
  cmd->add_option("--thin", f.thin, "keep every thin-th sweep");
  cmd->add_option("--seed", f.seed, "seed");
  cmd->add_option("--threads", f.threads, "worker threads for replicates (0: all)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--fixed-v", f.fixed_v, "hold V^{-1} at its initial value");
  cmd->add_flag("--fixed-hyper", f.fixed_hyper, "hold the (alpha, kappa) hyperparameters at their initial values");
}

lcm::ExperimentSpec build_spec(const std::string& kind, CLI::App* cmd, const Flags& f) {
  lcm::ExperimentSpec s = f.config.empty() ? lcm::ExperimentSpec{} : lcm::read_spec(f.config);
  if (!f.config.empty() && s.kind != kind)
    throw lcm::ValidationError("config kind '" + s.kind + "' does not match subcommand '" + kind + "'");
  s.kind = kind;
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--model")) {
    const bool model_changed = f.model != s.model;
    s.model = f.model;
    if (model_changed) s.hyper.reset();
  }
  if (given("--n")) s.n = f.n;
  if (given("--p")) s.p = f.p;
  if (given("--r")) s.r = f.r;
  if (given("--t")) s.t = f.t;
  if (given("--reps")) s.reps = f.reps;
  if (given("--burnin")) s.mcmc.burnin = f.burnin;
  if (given("--iters")) s.mcmc.iters = f.iters;
  if (given("--thin")) s.mcmc.thin = f.thin;
  if (given("--seed")) s.seed = f.seed;
  if (given("--threads")) s.threads = f.threads;
  if (given("--out")) s.out = f.out;
  if (given("--csv")) s.csv = f.csv;
  if (given("--chain")) s.chain = f.chain;
  if (given("--holdout")) s.holdout = f.holdout;
  if (given("--r-sweep")) s.r_sweep = f.r_sweep;
  if (given("--fixed-v")) s.mcmc.update_v = false;
  if (given("--fixed-hyper")) s.mcmc.update_hyper = false;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent conjugate multivariate models: simulation, fitting and prediction"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* simulate = app.add_subcommand("simulate", "emit a synthetic design as design.csv");
  CLI::App* compare = app.add_subcommand("compare", "LCM vs LGP total squared prediction error over replicates");
  CLI::App* bign = app.add_subcommand("bign", "single large-n LCM fit against the raw-data error");
  CLI::App* fit = app.add_subcommand("fit", "fit the LCM to a CSV (z, x1..xp[, holdout])");
  CLI::App* predict = app.add_subcommand("predict", "hold-out predictions from a fitted chain");
  CLI::App* basis = app.add_subcommand("basis", "Moran basis of a covariate CSV");
  for (CLI::App* cmd : {simulate, compare, bign, fit, predict, basis}) add_common(cmd, f);
  fit->add_option("--csv", f.csv, "data CSV")->check(CLI::ExistingFile);
  fit->add_option("--r-sweep", f.r_sweep, "extra ranks scored by DIC");
  basis->add_option("--csv", f.csv, "covariate CSV")->check(CLI::ExistingFile);
  predict->add_option("--chain", f.chain, "draws.csv written by fit");
  predict->add_option("--holdout", f.holdout, "hold-out CSV (x1..xp, phi1..phir[, z])");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (CLI::App* cmd : {simulate, compare, bign, fit, predict, basis}) {
      if (cmd->parsed()) lcm::run_experiment(build_spec(cmd->get_name(), cmd, f));
    }
  } catch (const lcm::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
