#include "lcm/chain.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcm/errors.hpp"

namespace lcm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void FitAccumulator::add(const VectorXd& y, const DataModel& model, const VectorXd& Z) {
  if (count == 0) {
    sum_predictor = VectorXd::Zero(y.size());
    sum_response = VectorXd::Zero(y.size());
  }
  sum_predictor += y;
  double dev = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    sum_response[i] += model.inverse_link(y[i]);
    dev += data_log_pmf(model, Z[i], y[i]);
  }
  sum_deviance += -2.0 * dev;
  ++count;
}

void FitAccumulator::merge(const FitAccumulator& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  sum_predictor += o.sum_predictor;
  sum_response += o.sum_response;
  sum_deviance += o.sum_deviance;
  count += o.count;
}

std::vector<std::string> state_names(Index p, Index r, Index n, bool with_xi) {
  std::vector<std::string> out;
  for (Index j = 1; j <= p; ++j) out.push_back("beta_" + std::to_string(j));
  for (Index j = 1; j <= r; ++j) out.push_back("eta_" + std::to_string(j));
  if (with_xi)
    for (Index i = 1; i <= n; ++i) out.push_back("xi_" + std::to_string(i));
  for (Index i = 2; i <= r; ++i)
    for (Index j = 1; j < i; ++j) out.push_back("v_" + std::to_string(i) + "_" + std::to_string(j));
  for (Index i = 1; i <= r; ++i) out.push_back("alpha_eta_" + std::to_string(i));
  for (Index i = 1; i <= r; ++i) out.push_back("kappa_eta_" + std::to_string(i));
  out.push_back("alpha_xi");
  out.push_back("kappa_xi");
  return out;
}

VectorXd flatten_state(const GibbsState& s, bool with_xi) {
  const Index p = s.beta.size(), r = s.eta.size(), n = with_xi ? s.xi.size() : 0;
  VectorXd out(p + r + n + r * (r - 1) / 2 + 2 * r + 2);
  Index k = 0;
  out.segment(k, p) = s.beta, k += p;
  out.segment(k, r) = s.eta, k += r;
  out.segment(k, n) = s.xi.head(n), k += n;
  for (Index i = 1; i < r; ++i) out.segment(k, i) = s.v_rows[i], k += i;
  out.segment(k, r) = s.alpha_eta, k += r;
  out.segment(k, r) = s.kappa_eta, k += r;
  out[k++] = s.alpha_xi;
  out[k++] = s.kappa_xi;
  return out;
}

Index ChainOutput::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<Index>(j);
  return -1;
}

VectorXd ChainOutput::posterior_mean() const {
  if (draws.rows() == 0) throw ValidationError("posterior_mean: empty chain");
  return draws.colwise().mean().transpose();
}

GibbsState ChainOutput::state_at(Index row) const {
  if (row < 0 || row >= draws.rows()) throw ValidationError("state_at: row out of range");
  const VectorXd x = draws.row(row).transpose();
  GibbsState s;
  Index k = 0;
  s.beta = x.segment(k, p), k += p;
  s.eta = x.segment(k, r), k += r;
  if (has_xi) {
    s.xi = x.segment(k, n), k += n;
  } else {
    s.xi = VectorXd::Zero(n);
  }
  s.v_rows.assign(r, VectorXd());
  for (Index i = 1; i < r; ++i) s.v_rows[i] = x.segment(k, i), k += i;
  s.alpha_eta = x.segment(k, r), k += r;
  s.kappa_eta = x.segment(k, r), k += r;
  s.alpha_xi = x[k++];
  s.kappa_xi = x[k++];
  return s;
}

double split_rhat(const VectorXd& trace) {
  const Index half = trace.size() / 2;
  if (half < 2) return std::numeric_limits<double>::quiet_NaN();
  const VectorXd a = trace.head(half), b = trace.segment(trace.size() - half, half);
  const double ma = a.mean(), mb = b.mean(), m = 0.5 * (ma + mb);
  const double va = (a.array() - ma).square().sum() / (half - 1.0);
  const double vb = (b.array() - mb).square().sum() / (half - 1.0);
  const double W = 0.5 * (va + vb);
  const double B = half * ((ma - m) * (ma - m) + (mb - m) * (mb - m));
  if (W <= 0.0) return B <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (half - 1.0) / half * W + B / half;
  return std::sqrt(var_plus / W);
}

void summarize(ChainOutput& c) {
  c.summaries.clear();
  const Index m = c.draws.rows();
  for (std::size_t j = 0; j < c.names.size(); ++j) {
    ParamSummary s;
    s.name = c.names[j];
    if (m > 0) {
      const VectorXd col = c.draws.col(static_cast<Index>(j));
      s.mean = col.mean();
      s.sd = m > 1 ? std::sqrt((col.array() - s.mean).square().sum() / (m - 1.0)) : 0.0;
      s.rhat = split_rhat(col);
    } else {
      s.mean = s.sd = s.rhat = std::numeric_limits<double>::quiet_NaN();
    }
    c.summaries.push_back(s);
  }
}

ChainOutput merge_chains(const ChainOutput& a, const ChainOutput& b) {
  if (a.names != b.names) throw ValidationError("merge_chains: parameter names differ");
  ChainOutput out = a;
  out.draws.resize(a.draws.rows() + b.draws.rows(), a.draws.cols());
  out.draws << a.draws, b.draws;
  out.fit.merge(b.fit);
  out.wall_seconds = a.wall_seconds + b.wall_seconds;
  out.rejected_blocks = a.rejected_blocks + b.rejected_blocks;
  out.slice_warnings = a.slice_warnings + b.slice_warnings;
  out.final_state = b.final_state;
  summarize(out);
  return out;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot open " + path + " for writing");
  return f;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

void write_draws_csv(const std::string& path, const ChainOutput& c) {
  std::ofstream f = open_out(path);
  for (std::size_t j = 0; j < c.names.size(); ++j) f << (j ? "," : "") << c.names[j];
  f << '\n';
  for (Index i = 0; i < c.draws.rows(); ++i) {
    for (Index j = 0; j < c.draws.cols(); ++j) f << (j ? "," : "") << num(c.draws(i, j));
    f << '\n';
  }
  if (!f) throw RuntimeFailure("write failed: " + path);
}

void write_summary_csv(const std::string& path, const ChainOutput& c) {
  std::ofstream f = open_out(path);
  f << "name,mean,sd,rhat\n";
  for (const ParamSummary& s : c.summaries) f << s.name << ',' << num(s.mean) << ',' << num(s.sd) << ',' << num(s.rhat) << '\n';
  if (!f) throw RuntimeFailure("write failed: " + path);
}

NumericTable read_numeric_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.empty()) throw ValidationError(path + ": line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  NumericTable t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.names.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0')
        throw ValidationError(path + ": line " + std::to_string(lineno) + ", column " + std::to_string(row.size() + 1) +
                              ": not a number");
      row.push_back(v);
    }
    if (row.size() != t.names.size())
      throw ValidationError(path + ": line " + std::to_string(lineno) + ": expected " + std::to_string(t.names.size()) +
                            " fields");
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < t.names.size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

ChainOutput read_draws_csv(const std::string& path) {
  NumericTable t = read_numeric_csv(path);
  ChainOutput c;
  c.names = std::move(t.names);
  c.draws = std::move(t.values);
  for (const std::string& nm : c.names) {
    if (starts_with(nm, "beta_")) ++c.p;
    if (starts_with(nm, "eta_")) ++c.r;
    if (starts_with(nm, "xi_")) ++c.n, c.has_xi = true;
  }
  summarize(c);
  return c;
}

}  // namespace lcm
