// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "htsgd/analysis.hpp"
#include "htsgd/limits.hpp"
#include "htsgd/parallel.hpp"
#include "htsgd/sweeps.hpp"
#include "htsgd/version.hpp"

namespace htsgd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

// Column-oriented result rows with a versioned schema tag; cells are
// preformatted so csv and jsonl output are byte-deterministic.
struct Table {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size()) throw std::logic_error("row arity mismatch");
    rows.push_back(std::move(cells));
  }

  void write_csv(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    out << "# schema: " << schema << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << csv_escape(columns[c]) << (c + 1 < columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << csv_escape(row[c]) << (c + 1 < row.size() ? "," : "");
      out << "\n";
    }
  }

  void write_jsonl(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    out << json{{"schema", schema}}.dump() << "\n";
    for (const auto& row : rows) {
      json obj;
      for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c]] = row[c];
      out << obj.dump() << "\n";
    }
  }

  void write(const fs::path& dir, const std::string& stem, OutputFormat format) const {
    if (format == OutputFormat::csv)
      write_csv(dir / (stem + ".csv"));
    else
      write_jsonl(dir / (stem + ".jsonl"));
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == name) return c;
    throw std::runtime_error("unknown column: " + name);
  }

  double cell_double(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(column_index(name)));
  }

  static Table read(const fs::path& path);
};

Table Table::read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open results file: " + path.string());
  Table t;
  std::string line;
  if (path.extension() == ".jsonl") {
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json obj = json::parse(line);
      if (first) {
        t.schema = obj.at("schema").get<std::string>();
        first = false;
        continue;
      }
      if (t.columns.empty())
        for (const auto& [key, value] : obj.items()) t.columns.push_back(key);
      std::vector<std::string> row;
      for (const auto& col : t.columns) row.push_back(obj.at(col).get<std::string>());
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  if (!std::getline(in, line) || line.rfind("# schema: ", 0) != 0)
    throw std::runtime_error("results file missing schema line: " + path.string());
  t.schema = line.substr(10);
  if (!std::getline(in, line)) throw std::runtime_error("results file missing header");
  t.columns = split_csv_row(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row = split_csv_row(line);
    if (row.size() != t.columns.size())
      throw std::runtime_error("malformed results row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string target;
};

struct Summary {
  std::vector<Check> checks;
  json metrics = json::object();
  std::vector<std::string> warnings;

  bool overall_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(const std::string& name, bool pass, double value, const std::string& target) {
    checks.push_back({name, pass, value, target});
  }

  void write(const fs::path& dir, ExperimentKind kind) const {
    json doc;
    doc["schema"] = "htsgd.summary.v1";
    doc["kind"] = to_string(kind);
    doc["overall_pass"] = overall_pass();
    doc["checks"] = json::array();
    for (const auto& c : checks)
      doc["checks"].push_back(json{{"name", c.name},
                                   {"pass", c.pass},
                                   {"value", format_double(c.value)},
                                   {"target", c.target}});
    doc["metrics"] = metrics;
    doc["warnings"] = warnings;
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << doc.dump(2) << "\n";
  }

  void print(std::ostream& os) const {
    for (const auto& c : checks)
      os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " = " << format_double(c.value)
         << " (target " << c.target << ")\n";
    for (const auto& w : warnings) os << "[warn] " << w << "\n";
  }
};

SchedulePurpose purpose_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::averaging_law:
      return SchedulePurpose::averaging;
    case ExperimentKind::moment_rate:
      return SchedulePurpose::moment;
    default:
      return SchedulePurpose::limit;
  }
}

bool needs_schedule(ExperimentKind kind) {
  return kind == ExperimentKind::moment_rate || kind == ExperimentKind::limit_law ||
         kind == ExperimentKind::averaging_law || kind == ExperimentKind::mean_measure;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::moment_rate: return "moment_rate";
    case ExperimentKind::limit_law: return "limit_law";
    case ExperimentKind::averaging_law: return "averaging_law";
    case ExperimentKind::mean_measure: return "mean_measure";
    case ExperimentKind::drift_check: return "drift_check";
    case ExperimentKind::lemma_sweep: return "lemma_sweep";
    case ExperimentKind::complexity_table: return "complexity_table";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from(const std::string& name) {
  for (auto kind : {ExperimentKind::moment_rate, ExperimentKind::limit_law,
                    ExperimentKind::averaging_law, ExperimentKind::mean_measure,
                    ExperimentKind::drift_check, ExperimentKind::lemma_sweep,
                    ExperimentKind::complexity_table})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown experiment kind: " + name);
}

ExperimentSetup resolve_experiment(const ConfigFile& cfg) {
  ExperimentSetup s;
  s.kind = experiment_kind_from(cfg.get_string("experiment.kind"));
  s.master_seed = cfg.get_uint("experiment.master_seed", 1);
  s.replications = cfg.get_int("experiment.replications", 1000);
  s.output_dir = cfg.get_string("experiment.output", "out");
  const std::string format = cfg.get_string("experiment.format", "csv");
  if (format == "csv")
    s.format = OutputFormat::csv;
  else if (format == "jsonl")
    s.format = OutputFormat::jsonl;
  else
    throw ConfigError("experiment.format must be csv or jsonl");

  s.problem_type = cfg.get_string("problem.type", "quadratic");
  if (s.problem_type != "quadratic" && s.problem_type != "linear_regression")
    throw ConfigError("problem.type must be quadratic or linear_regression");
  if (cfg.has("problem.a"))
    s.curvature_diag = cfg.get_double_list("problem.a");
  if (cfg.has("problem.theta_star"))
    s.theta_star = cfg.get_double_list("problem.theta_star");
  const std::string xlaw = cfg.get_string("problem.x_law", "rademacher");
  if (xlaw == "rademacher")
    s.predictors.kind = PredictorLaw::Kind::rademacher;
  else if (xlaw == "gaussian")
    s.predictors.kind = PredictorLaw::Kind::gaussian;
  else
    throw ConfigError("problem.x_law must be rademacher or gaussian");
  s.predictors.scale = cfg.get_double("problem.x_scale", 1.0);

  const std::string noise = cfg.get_string("noise.kind", "pareto");
  const double alpha = cfg.get_double("noise.alpha", 1.5);
  const double scale = cfg.get_double("noise.scale", 1.0);
  try {
    if (noise == "pareto") {
      s.noise = cfg.has("noise.log_kappa")
                    ? TailModel::pareto_log_perturbed(alpha, cfg.get_double("noise.log_kappa"))
                    : TailModel::pareto(alpha, scale);
    } else if (noise == "stable") {
      s.noise = TailModel::stable(alpha, scale);
    } else {
      throw ConfigError("noise.kind must be pareto or stable");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }

  s.schedule.rho = cfg.get_double("schedule.rho", 0.5);
  s.schedule.c_gamma = cfg.get_double("schedule.c_gamma", 1.0);
  s.schedule.r = cfg.get_double("schedule.r", 0.0);
  s.schedule.c_batch = cfg.get_double("schedule.c_batch", 1.0);

  if (cfg.has("run.N_grid"))
    s.n_grid = cfg.get_int_list("run.N_grid");
  else
    s.n_grid = {cfg.get_int("run.N", 1000)};
  for (std::size_t g = 0; g < s.n_grid.size(); ++g)
    if (s.n_grid[g] < 1 || (g > 0 && s.n_grid[g] <= s.n_grid[g - 1]))
      throw ConfigError("run.N_grid must be increasing and positive");

  if (s.problem_type == "quadratic") {
    if (s.theta_star.size() != s.curvature_diag.size())
      throw ConfigError("problem.theta_star must match problem.a in length");
  } else if (s.theta_star.size() != 1 || s.curvature_diag.size() != 1) {
    throw ConfigError("linear_regression is univariate");
  }
  if (cfg.has("run.theta0"))
    s.theta0 = cfg.get_double_list("run.theta0");
  else {
    s.theta0 = s.theta_star;
    for (auto& v : s.theta0) v += 1.0;
  }
  if (s.theta0.size() != s.theta_star.size())
    throw ConfigError("run.theta0 must match the problem dimension");

  s.p = cfg.get_double("run.p", 1.2);
  s.s_threshold = cfg.get_double("run.s", 1.0);
  s.ks_level = cfg.get_double("acceptance.ks_level", 0.01);
  s.tolerance = cfg.get_double("acceptance.tolerance", 0.05);
  s.drift_tol = cfg.get_double("acceptance.drift_tol", 1e-6);
  s.max_divergence_fraction = cfg.get_double("acceptance.max_divergence_fraction", 0.01);
  s.slope_margin = cfg.get_double("acceptance.slope_margin", 0.08);
  s.bound_ratio_max = cfg.get_double("acceptance.bound_ratio_max", 1.5);
  s.series_terms = static_cast<int>(cfg.get_int("oracle.series_terms", 1000));
  s.oracle_draws = cfg.get_int("oracle.draws", 0);
  s.triangle_trials = cfg.get_int("sweep.triangle_trials", 200000);
  s.contraction_trials = cfg.get_int("sweep.contraction_trials", 20000);
  s.toeplitz_n = cfg.get_int("sweep.toeplitz_n", 100000);

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) throw ConfigError("unknown config key: " + unused.front());

  // Canonical flattened view, sufficient to reproduce this setup exactly.
  auto& r = s.resolved;
  r["experiment.kind"] = to_string(s.kind);
  r["experiment.master_seed"] = std::to_string(s.master_seed);
  r["experiment.replications"] = format_int(s.replications);
  r["experiment.output"] = s.output_dir;
  r["experiment.format"] = s.format == OutputFormat::csv ? "csv" : "jsonl";
  r["problem.type"] = s.problem_type;
  {
    std::string a, ts, t0;
    for (std::size_t i = 0; i < s.curvature_diag.size(); ++i)
      a += (i ? "," : "") + format_double(s.curvature_diag[i]);
    for (std::size_t i = 0; i < s.theta_star.size(); ++i)
      ts += (i ? "," : "") + format_double(s.theta_star[i]);
    for (std::size_t i = 0; i < s.theta0.size(); ++i)
      t0 += (i ? "," : "") + format_double(s.theta0[i]);
    r["problem.a"] = a;
    r["problem.theta_star"] = ts;
    r["run.theta0"] = t0;
  }
  r["problem.x_law"] =
      s.predictors.kind == PredictorLaw::Kind::rademacher ? "rademacher" : "gaussian";
  r["problem.x_scale"] = format_double(s.predictors.scale);
  r["noise.kind"] = s.noise.kind == TailKind::pareto_symmetric ? "pareto" : "stable";
  r["noise.alpha"] = format_double(s.noise.alpha);
  r["noise.scale"] = format_double(s.noise.scale);
  if (s.noise.log_kappa) r["noise.log_kappa"] = format_double(*s.noise.log_kappa);
  r["schedule.rho"] = format_double(s.schedule.rho);
  r["schedule.c_gamma"] = format_double(s.schedule.c_gamma);
  r["schedule.r"] = format_double(s.schedule.r);
  r["schedule.c_batch"] = format_double(s.schedule.c_batch);
  {
    std::string grid;
    for (std::size_t i = 0; i < s.n_grid.size(); ++i)
      grid += (i ? "," : "") + format_int(s.n_grid[i]);
    r["run.N_grid"] = grid;
  }
  r["run.p"] = format_double(s.p);
  r["run.s"] = format_double(s.s_threshold);
  r["acceptance.ks_level"] = format_double(s.ks_level);
  r["acceptance.tolerance"] = format_double(s.tolerance);
  r["acceptance.drift_tol"] = format_double(s.drift_tol);
  r["acceptance.max_divergence_fraction"] = format_double(s.max_divergence_fraction);
  r["acceptance.slope_margin"] = format_double(s.slope_margin);
  r["acceptance.bound_ratio_max"] = format_double(s.bound_ratio_max);
  r["oracle.series_terms"] = format_int(s.series_terms);
  r["oracle.draws"] = format_int(s.oracle_draws);
  r["sweep.triangle_trials"] = format_int(s.triangle_trials);
  r["sweep.contraction_trials"] = format_int(s.contraction_trials);
  r["sweep.toeplitz_n"] = format_int(s.toeplitz_n);
  return s;
}

std::unique_ptr<Problem> make_problem(const ExperimentSetup& setup) {
  if (setup.problem_type == "quadratic") {
    const auto d = static_cast<Eigen::Index>(setup.curvature_diag.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd star(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      a(i, i) = setup.curvature_diag[static_cast<std::size_t>(i)];
      star(i) = setup.theta_star[static_cast<std::size_t>(i)];
    }
    return std::make_unique<QuadraticProblem>(a, star, setup.noise);
  }
  return std::make_unique<LinearRegressionProblem>(setup.theta_star.front(), setup.predictors,
                                                   setup.noise);
}

namespace {

struct RunnerContext {
  const ExperimentSetup& setup;
  std::unique_ptr<Problem> problem;
  Table results;
  Table oracle;
  Summary summary;
  bool has_oracle = false;
};

RunConfig base_run_config(const RunnerContext& ctx) {
  RunConfig rc;
  rc.problem = ctx.problem.get();
  rc.schedule = ctx.setup.schedule;
  rc.master_seed = ctx.setup.master_seed;
  rc.theta0 = Eigen::Map<const Eigen::VectorXd>(ctx.setup.theta0.data(),
                                                static_cast<Eigen::Index>(ctx.setup.theta0.size()));
  rc.normalization_tail = ctx.setup.noise;
  return rc;
}

void run_moment_rate(RunnerContext& ctx) {
  const ExperimentSetup& s = ctx.setup;
  RunConfig rc = base_run_config(ctx);
  rc.iterations = s.n_grid.back();
  const GridEnsembleResult grid =
      monte_carlo_error_grid(rc, s.replications, s.n_grid, s.p);

  ctx.results.schema = "htsgd.moment_rate.v1";
  ctx.results.columns = {"N", "gamma_over_b", "mean_err_p", "mom_err_p", "stderr"};
  std::vector<double> xs, ys, ratios;
  for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
    const auto& vals = grid.values[g];
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / static_cast<double>(vals.size())) /
                      std::sqrt(static_cast<double>(vals.size()));
    const double mom = median_of_means(vals, 32);
    const double gob = learning_rate(s.schedule, s.n_grid[g]) /
                       static_cast<double>(batch_size(s.schedule, s.n_grid[g]));
    xs.push_back(gob);
    ys.push_back(mom);
    ratios.push_back(mom / std::pow(gob, s.p - 1.0));
    ctx.results.add_row({format_int(s.n_grid[g]), format_double(gob), format_double(mean),
                         format_double(mom), format_double(se)});
  }

  const RateFit fit = fit_rate(xs, ys);
  const double exact_exponent = s.p * (1.0 - 1.0 / s.noise.alpha);
  ctx.summary.metrics["fitted_slope"] = format_double(fit.slope);
  ctx.summary.metrics["fit_residual_rms"] = format_double(fit.residual_rms);
  ctx.summary.metrics["lp_bound_exponent"] = format_double(s.p - 1.0);
  ctx.summary.metrics["distributional_exponent"] = format_double(exact_exponent);
  ctx.summary.add("slope_in_band",
                  fit.slope >= exact_exponent - s.slope_margin &&
                      fit.slope <= exact_exponent + s.slope_margin,
                  fit.slope,
                  "[" + format_double(exact_exponent - s.slope_margin) + ", " +
                      format_double(exact_exponent + s.slope_margin) + "]");
  ctx.summary.add("slope_at_least_lp_bound", fit.slope >= s.p - 1.0, fit.slope,
                  ">= " + format_double(s.p - 1.0));
  const std::size_t tail = std::min<std::size_t>(3, ratios.size());
  double lo = ratios[ratios.size() - tail], hi = lo;
  for (std::size_t g = ratios.size() - tail; g < ratios.size(); ++g) {
    lo = std::min(lo, ratios[g]);
    hi = std::max(hi, ratios[g]);
  }
  ctx.summary.add("bound_ratio_tail", hi / lo < s.bound_ratio_max, hi / lo,
                  "< " + format_double(s.bound_ratio_max));
  const double div_frac =
      static_cast<double>(grid.diverged_count) / static_cast<double>(s.replications);
  if (div_frac > s.max_divergence_fraction)
    ctx.summary.warnings.push_back("divergence fraction " + format_double(div_frac) +
                                   " above threshold");
  ctx.summary.metrics["diverged"] = format_int(grid.diverged_count);
}

void run_distributional(RunnerContext& ctx, bool averaging) {
  const ExperimentSetup& s = ctx.setup;
  RunConfig rc = base_run_config(ctx);
  rc.iterations = s.n_grid.back();
  const EnsembleResult ens = monte_carlo(rc, s.replications,
                                         averaging ? EnsembleStatistic::normalized_average
                                                   : EnsembleStatistic::normalized_iterate);

  const double a = ctx.problem->jacobian_at_optimum()(0, 0);
  const std::int64_t oracle_n = s.oracle_draws > 0 ? s.oracle_draws : s.replications;
  std::vector<double> oracle;
  std::string oracle_name;
  if (s.noise.kind == TailKind::stable_symmetric) {
    const OuStationaryStableSampler sampler(s.noise.alpha, s.noise.scale, a);
    oracle = sample_many(sampler, oracle_n, s.master_seed);
    oracle_name = "closed-form stationary stable law, scale " + format_double(sampler.scale());
  } else {
    const ExponentMeasure1D unit = ExponentMeasure1D::symmetric_unit(s.noise.alpha);
    const ExponentMeasure1D measure =
        averaging ? linear_image_measure(unit, a) : ou_stationary_measure(unit, a);
    const SeriesStableSampler sampler(measure, s.series_terms);
    oracle = sample_many(sampler, oracle_n, s.master_seed);
    oracle_name = "series oracle, tail weight " + format_double(measure.c_plus + measure.c_minus);
  }

  ctx.results.schema =
      averaging ? "htsgd.averaging_law.v1" : "htsgd.limit_law.v1";
  ctx.results.columns = {"replication", "value"};
  for (std::size_t i = 0; i < ens.values.size(); ++i)
    ctx.results.add_row({format_int(static_cast<std::int64_t>(i)), format_double(ens.values[i])});
  ctx.has_oracle = true;
  ctx.oracle.schema = "htsgd.oracle.v1";
  ctx.oracle.columns = {"index", "value"};
  for (std::size_t i = 0; i < oracle.size(); ++i)
    ctx.oracle.add_row({format_int(static_cast<std::int64_t>(i)), format_double(oracle[i])});

  const KsResult ks = ks_two_sample(ens.values, oracle);
  double normalizer = 0.0;
  if (s.noise.exact_quantile()) {
    normalizer = averaging ? averaging_normalizer(s.schedule, s.noise, rc.iterations).value
                           : iterate_normalizer(s.schedule, s.noise, rc.iterations);
  } else if (averaging) {
    double beta = 0.0;
    for (std::int64_t i = 1; i <= rc.iterations; ++i)
      beta += std::pow(static_cast<double>(batch_size(s.schedule, i)), 1.0 - s.noise.alpha);
    normalizer = std::pow(beta, 1.0 / s.noise.alpha);
  } else {
    normalizer = power_law_normalizer(s.schedule, s.noise.alpha, rc.iterations);
  }
  ctx.summary.metrics["ks_statistic"] = format_double(ks.statistic);
  ctx.summary.metrics["ks_p_value"] = format_double(ks.p_value);
  ctx.summary.metrics["oracle_draws"] = format_int(oracle_n);
  ctx.summary.metrics["oracle"] = oracle_name;
  ctx.summary.metrics["normalizer"] = format_double(normalizer);
  ctx.summary.add("ks_p_above_level", ks.p_value > s.ks_level, ks.p_value,
                  "> " + format_double(s.ks_level));
  const double div_frac =
      static_cast<double>(ens.diverged_count) / static_cast<double>(s.replications);
  if (div_frac > s.max_divergence_fraction)
    ctx.summary.warnings.push_back("divergence fraction " + format_double(div_frac) +
                                   " above threshold");
  ctx.summary.metrics["diverged"] = format_int(ens.diverged_count);
}

void run_mean_measure(RunnerContext& ctx) {
  const ExperimentSetup& s = ctx.setup;
  const double a = ctx.problem->jacobian_at_optimum()(0, 0);
  const bool averaging_valid =
      validate_schedule(s.schedule, s.noise.alpha, ctx.problem->a_min(), ctx.problem->a_max(),
                        SchedulePurpose::averaging)
          .ok();

  ctx.results.schema = "htsgd.mean_measure.v1";
  ctx.results.columns = {"N",           "iterate_sum",        "iterate_target",
                         "average_sum", "average_target",     "characterization_sum",
                         "characterization_target"};
  const double iterate_target =
      std::pow(s.s_threshold, -s.noise.alpha) / (s.noise.alpha * a);
  const double average_target = std::pow(a * s.s_threshold, -s.noise.alpha);
  double last_it = 0.0, last_avg = 0.0, last_char = 0.0;
  for (std::int64_t n : s.n_grid) {
    last_it = mean_measure_sum_iterates(s.schedule, s.noise, a, n, s.s_threshold);
    std::string avg_cell = "nan", char_cell = "nan";
    if (averaging_valid) {
      last_avg = mean_measure_sum_averages(s.schedule, s.noise, a, n, s.s_threshold);
      last_char = batch_tail_characterization_sum(s.schedule, s.noise, n);
      avg_cell = format_double(last_avg);
      char_cell = format_double(last_char);
    }
    ctx.results.add_row({format_int(n), format_double(last_it), format_double(iterate_target),
                         avg_cell, format_double(average_target), char_cell, "1"});
  }
  ctx.summary.add("iterate_sum_within_tolerance",
                  std::abs(last_it - iterate_target) <= s.tolerance * iterate_target, last_it,
                  format_double(iterate_target) + " +/- " + format_double(100.0 * s.tolerance) +
                      "%");
  if (averaging_valid) {
    ctx.summary.add("average_sum_within_tolerance",
                    std::abs(last_avg - average_target) <= s.tolerance * average_target, last_avg,
                    format_double(average_target) + " +/- " +
                        format_double(100.0 * s.tolerance) + "%");
    ctx.summary.add("characterization_sum_within_tolerance",
                    std::abs(last_char - 1.0) <= s.tolerance, last_char,
                    "1 +/- " + format_double(100.0 * s.tolerance) + "%");
  } else {
    ctx.summary.warnings.push_back(
        "schedule fails the averaging conditions; average-sum columns omitted");
  }
}

void run_drift_check(RunnerContext& ctx) {
  const ExperimentSetup& s = ctx.setup;
  ctx.results.schema = "htsgd.drift_check.v1";
  ctx.results.columns = {"alpha",       "c_plus",          "c_minus",         "a",
                         "tail_moment", "boundary_term",   "interchange_term", "total",
                         "measure_integral", "identity_residual", "magnitude_residual"};
  const double alphas[] = {1.3, s.noise.alpha, 1.8};
  const double rates[] = {0.5, 1.0, 2.0};
  const std::pair<double, double> weights[] = {{1.0, 0.0}, {0.5, 0.5}, {0.75, 0.25}};
  double worst_identity = 0.0, worst_magnitude = 0.0;
  for (double alpha : alphas) {
    for (double a : rates) {
      for (auto [cp, cm] : weights) {
        const DriftDecomposition d =
            drift_decomposition(ExponentMeasure1D{alpha, cp, cm}, a, 1e-8);
        const double identity =
            d.interchange_term - (d.tail_first_moment / a - d.measure_integral);
        const double magnitude = std::abs(d.total) - std::abs(d.measure_integral);
        worst_identity = std::max(worst_identity, std::abs(identity));
        worst_magnitude = std::max(worst_magnitude, std::abs(magnitude));
        ctx.results.add_row({format_double(alpha), format_double(cp), format_double(cm),
                             format_double(a), format_double(d.tail_first_moment),
                             format_double(d.boundary_term), format_double(d.interchange_term),
                             format_double(d.total), format_double(d.measure_integral),
                             format_double(identity), format_double(magnitude)});
      }
    }
  }
  ctx.summary.add("interchange_identity", worst_identity <= s.drift_tol, worst_identity,
                  "<= " + format_double(s.drift_tol));
  ctx.summary.add("drift_magnitude_match", worst_magnitude <= s.drift_tol, worst_magnitude,
                  "<= " + format_double(s.drift_tol));
  ctx.summary.warnings.push_back(
      "sign orientation of the drift total versus the stationary-measure integral is reported, "
      "not asserted");
}

void run_lemma_sweep(RunnerContext& ctx) {
  const ExperimentSetup& s = ctx.setup;
  ctx.results.schema = "htsgd.lemma_sweep.v1";
  ctx.results.columns = {"check", "trials", "violations", "statistic", "detail"};
  std::vector<SweepOutcome> outcomes;
  const SweepOutcome euclidean =
      triangle_inequality_sweep(s.triangle_trials, s.master_seed, TriangleForm::euclidean);
  outcomes.push_back(euclidean);
  outcomes.push_back(triangle_inequality_sweep(s.triangle_trials, s.master_seed,
                                               TriangleForm::componentwise));
  outcomes.push_back(contraction_inequality_sweep(s.contraction_trials, s.master_seed));
  outcomes.push_back(toeplitz_moment_instance(s.toeplitz_n));
  outcomes.push_back(toeplitz_truncation_instance(s.toeplitz_n));
  outcomes.push_back(recursion_moment_instance(s.toeplitz_n));

  const ScheduleSpec sandwich_spec{0.5, 0.5, 0.0, 1.0};
  const SandwichOutcome sandwich =
      step_weight_sandwich(sandwich_spec, 1.0, {2000, 4000, 8000}, 0.05);
  SweepOutcome sw;
  sw.name = "step_weight_sandwich";
  sw.trials = 3;
  sw.violations = (sandwich.found_upper && sandwich.found_lower) ? 0 : 1;
  sw.statistic = static_cast<double>(sandwich.upper_from);
  sw.detail = "upper bound from index " + format_int(sandwich.upper_from) + ", lower window T = " +
              format_double(sandwich.lower_window);
  outcomes.push_back(sw);

  std::int64_t true_form_violations = 0;
  for (const auto& o : outcomes) {
    if (o.name != "p_norm_triangle_euclidean") true_form_violations += o.violations;
    ctx.results.add_row({o.name, format_int(o.trials), format_int(o.violations),
                         format_double(o.statistic), o.detail});
  }
  ctx.summary.add("true_form_sweeps_clean", true_form_violations == 0,
                  static_cast<double>(true_form_violations), "0 violations");
  // The euclidean cross term is not the norm gradient, so counterexamples in
  // d >= 2 are the expected finding; the sweep must keep detecting them.
  ctx.summary.add("euclidean_triangle_finds_counterexamples", euclidean.violations > 0,
                  static_cast<double>(euclidean.violations), "> 0 in d >= 2");
}

void run_complexity_table(RunnerContext& ctx) {
  const ExperimentSetup& s = ctx.setup;
  ctx.results.schema = "htsgd.complexity_table.v1";
  ctx.results.columns = {"table", "alpha_or_p", "rho", "r", "value"};
  bool monotone = true;
  const double p = s.p > 1.0 ? s.p : 1.5;
  for (double rho = 0.1; rho <= 0.91; rho += 0.2) {
    double prev = 0.0;
    bool first = true;
    for (double r = 0.0; r <= 2.001; r += 0.25) {
      const double e = complexity_E(p, rho, r);
      if (!first && e >= prev) monotone = false;
      prev = e;
      first = false;
      ctx.results.add_row({"samples_exponent", format_double(p), format_double(rho),
                           format_double(r), format_double(e)});
    }
  }
  bool monotone_b = true;
  for (double alpha : {1.2, 1.5, 1.8}) {
    double prev = 0.0;
    bool first = true;
    for (double r = 0.0; r <= std::min(2.0, 1.0 / (alpha - 1.0)) + 1e-9; r += 0.125) {
      const double b = complexity_B(alpha, r);
      if (!first && b >= prev) monotone_b = false;
      prev = b;
      first = false;
      ctx.results.add_row({"normalizer_exponent", format_double(alpha), "nan", format_double(r),
                           format_double(b)});
    }
  }
  ctx.summary.add("samples_exponent_decreasing_in_r", monotone, monotone ? 1.0 : 0.0,
                  "strictly decreasing");
  ctx.summary.add("normalizer_exponent_decreasing_in_r", monotone_b, monotone_b ? 1.0 : 0.0,
                  "strictly decreasing");
  ctx.summary.add("spot_value_samples_exponent",
                  std::abs(complexity_E(1.5, 0.5, 1.0) - 4.0) <= 1e-12,
                  complexity_E(1.5, 0.5, 1.0), "4 +/- 1e-12");
  ctx.summary.add("spot_value_normalizer_exponent",
                  std::abs(complexity_B(1.5, 1.0) - 1.0 / 6.0) <= 1e-12, complexity_B(1.5, 1.0),
                  "1/6 +/- 1e-12");
}

}  // namespace

ExperimentStatus run_experiment(const ExperimentSetup& setup) {
  ExperimentStatus status;
  const auto start = std::chrono::steady_clock::now();

  RunnerContext ctx{setup, nullptr, {}, {}, {}, false};
  try {
    ctx.problem = make_problem(setup);
  } catch (const std::exception& e) {
    status.exit_code = 2;
    status.message = std::string("invalid problem: ") + e.what();
    return status;
  }

  if (needs_schedule(setup.kind)) {
    ScheduleReport report;
    try {
      report = validate_schedule(setup.schedule, setup.noise.alpha, ctx.problem->a_min(),
                                 ctx.problem->a_max(), purpose_for(setup.kind));
    } catch (const std::invalid_argument& e) {
      status.exit_code = 3;
      status.message = std::string("schedule rejected: ") + e.what();
      return status;
    }
    if (!report.ok()) {
      status.exit_code = 3;
      status.message = "schedule validation failed: " + report.first_failure();
      return status;
    }
    const bool univariate = ctx.problem->dim() == 1;
    if ((setup.kind == ExperimentKind::limit_law || setup.kind == ExperimentKind::averaging_law) &&
        !univariate) {
      status.exit_code = 2;
      status.message = "distributional experiments require a 1-d problem";
      return status;
    }
    if (setup.kind == ExperimentKind::averaging_law && !setup.noise.exact_quantile()) {
      status.exit_code = 2;
      status.message = "averaging_law needs an exact-quantile (pareto) noise model";
      return status;
    }
    if (setup.kind == ExperimentKind::mean_measure && !setup.noise.exact_quantile()) {
      status.exit_code = 2;
      status.message = "mean_measure needs an exact-quantile (pareto) noise model";
      return status;
    }
    if (setup.problem_type == "linear_regression" &&
        (setup.kind == ExperimentKind::limit_law || setup.kind == ExperimentKind::averaging_law) &&
        (setup.predictors.kind != PredictorLaw::Kind::rademacher ||
         setup.predictors.scale != 1.0)) {
      status.exit_code = 2;
      status.message =
          "distributional experiments on linear_regression need rademacher predictors of scale 1 "
          "(otherwise the noise-norm law has no exact quantile)";
      return status;
    }
  }

  try {
    switch (setup.kind) {
      case ExperimentKind::moment_rate: run_moment_rate(ctx); break;
      case ExperimentKind::limit_law: run_distributional(ctx, false); break;
      case ExperimentKind::averaging_law: run_distributional(ctx, true); break;
      case ExperimentKind::mean_measure: run_mean_measure(ctx); break;
      case ExperimentKind::drift_check: run_drift_check(ctx); break;
      case ExperimentKind::lemma_sweep: run_lemma_sweep(ctx); break;
      case ExperimentKind::complexity_table: run_complexity_table(ctx); break;
    }
  } catch (const std::exception& e) {
    status.exit_code = 2;
    status.message = std::string("experiment failed: ") + e.what();
    return status;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(setup.output_dir);
  ctx.results.write(setup.output_dir, "results", setup.format);
  if (ctx.has_oracle) ctx.oracle.write(setup.output_dir, "oracle", setup.format);
  ctx.summary.write(setup.output_dir, setup.kind);

  json manifest;
  manifest["schema"] = "htsgd.manifest.v1";
  manifest["tool"] = "htsgd";
  manifest["version"] = kVersion;
  manifest["rng_scheme"] = kRngScheme;
  manifest["kind"] = to_string(setup.kind);
  manifest["config"] = json::object();
  for (const auto& [key, value] : setup.resolved) manifest["config"][key] = value;
  manifest["outputs"] = json::array();
  manifest["outputs"].push_back(setup.format == OutputFormat::csv ? "results.csv"
                                                                  : "results.jsonl");
  if (ctx.has_oracle)
    manifest["outputs"].push_back(setup.format == OutputFormat::csv ? "oracle.csv"
                                                                    : "oracle.jsonl");
  manifest["outputs"].push_back("summary.json");
  manifest["wall_seconds"] = wall;  // the one field that varies between reruns
  std::ofstream mf(fs::path(setup.output_dir) / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";

  ctx.summary.print(std::cout);
  status.warning = !ctx.summary.warnings.empty();
  status.overall_pass = ctx.summary.overall_pass();
  status.message = status.overall_pass ? "all checks passed" : "some checks failed";
  return status;
}

namespace {

bool looks_like_manifest(const std::string& path) {
  return path.size() > 5 && path.substr(path.size() - 5) == ".json";
}

ConfigFile load_config(const std::string& path) {
  if (!looks_like_manifest(path)) return ConfigFile::parse_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ConfigError("corrupt manifest " + path + ": " + e.what());
  }
  if (!manifest.contains("schema") || manifest["schema"] != "htsgd.manifest.v1")
    throw ConfigError("unsupported manifest schema in " + path);
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : manifest.at("config").items())
    values[key] = value.get<std::string>();
  return ConfigFile::from_map(std::move(values));
}

}  // namespace

int cli_run(const std::string& path) {
  ExperimentSetup setup;
  try {
    setup = resolve_experiment(load_config(path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const ExperimentStatus status = run_experiment(setup);
  if (status.exit_code != 0) {
    std::cerr << status.message << "\n";
    return status.exit_code;
  }
  std::cout << (status.overall_pass ? "OK: " : "NOTE: ") << status.message << "; results in "
            << setup.output_dir << "\n";
  return 0;
}

int cli_validate(const std::string& path) {
  ExperimentSetup setup;
  try {
    setup = resolve_experiment(load_config(path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (!needs_schedule(setup.kind)) {
    std::cout << "experiment kind " << to_string(setup.kind)
              << " has no schedule conditions\n";
    return 0;
  }
  std::unique_ptr<Problem> problem;
  try {
    problem = make_problem(setup);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  ScheduleReport report;
  try {
    report = validate_schedule(setup.schedule, setup.noise.alpha, problem->a_min(),
                               problem->a_max(), purpose_for(setup.kind));
  } catch (const std::invalid_argument& e) {
    std::cerr << "schedule rejected: " << e.what() << "\n";
    return 3;
  }
  for (const auto& c : report.conditions)
    std::cout << (c.pass ? (c.boundary ? "[boundary] " : "[pass] ") : "[FAIL] ") << c.name
              << ": " << c.detail << "\n";
  if (!report.ok()) {
    std::cerr << "schedule validation failed: " << report.first_failure() << "\n";
    return 3;
  }
  return 0;
}

int cli_seeds(const std::string& path) {
  ExperimentSetup setup;
  try {
    setup = resolve_experiment(load_config(path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "scheme: " << kRngScheme << "\n";
  std::cout << "master_seed: " << setup.master_seed << "\n";
  const std::int64_t show = std::min<std::int64_t>(setup.replications, 8);
  for (std::int64_t rep = 0; rep < show; ++rep)
    std::cout << "data stream " << rep << ": 0x" << std::hex
              << derive_stream_key(setup.master_seed, StreamDomain::data,
                                   static_cast<std::uint64_t>(rep))
              << std::dec << "\n";
  for (std::int64_t draw = 0; draw < std::min<std::int64_t>(show, 4); ++draw)
    std::cout << "series oracle stream " << draw << ": 0x" << std::hex
              << derive_stream_key(setup.master_seed, StreamDomain::series_oracle,
                                   static_cast<std::uint64_t>(draw))
              << std::dec << "\n";
  return 0;
}

namespace {

std::vector<double> column_values(const Table& t, const std::string& name) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back(t.cell_double(r, name));
  return out;
}

void write_plot(const fs::path& path, const std::vector<std::string>& columns,
                const std::vector<std::vector<double>>& series) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "");
  out << "\n";
  if (series.empty()) return;
  for (std::size_t r = 0; r < series.front().size(); ++r) {
    for (std::size_t c = 0; c < series.size(); ++c)
      out << format_double(series[c][r]) << (c + 1 < series.size() ? "," : "");
    out << "\n";
  }
}

}  // namespace

int cli_report(const std::string& results_dir) {
  const fs::path dir(results_dir);
  json manifest;
  {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) {
      std::cerr << "missing manifest: " << (dir / "manifest.json").string() << "\n";
      return 2;
    }
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      std::cerr << "corrupt manifest: " << e.what() << "\n";
      return 2;
    }
  }
  if (!manifest.contains("schema") || manifest["schema"] != "htsgd.manifest.v1") {
    std::cerr << "unsupported manifest schema\n";
    return 2;
  }
  const std::string kind_name = manifest.at("kind").get<std::string>();
  ExperimentKind kind;
  try {
    kind = experiment_kind_from(kind_name);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const std::string results_name = manifest.at("outputs").at(0).get<std::string>();
  Table results;
  try {
    results = Table::read(dir / results_name);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const std::string expected_schema = "htsgd." + kind_name + ".v1";
  if (results.schema != expected_schema) {
    std::cerr << "unknown results schema " << results.schema << " (expected " << expected_schema
              << ")\n";
    return 2;
  }

  std::cout << "kind: " << kind_name << "  rows: " << results.rows.size() << "\n";
  switch (kind) {
    case ExperimentKind::moment_rate: {
      const auto x = column_values(results, "gamma_over_b");
      const auto y = column_values(results, "mom_err_p");
      const RateFit fit = fit_rate(x, y);
      const ExperimentSetup setup = resolve_experiment(load_config((dir / "manifest.json").string()));
      const double exact = setup.p * (1.0 - 1.0 / setup.noise.alpha);
      std::cout << "fitted slope " << format_double(fit.slope) << " (power-law bound exponent "
                << format_double(setup.p - 1.0) << ", distributional exponent "
                << format_double(exact) << ")\n";
      std::vector<double> fitted(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        fitted[i] = std::exp(fit.intercept + fit.slope * std::log(x[i]));
      write_plot(dir / "plot_rate.csv", {"gamma_over_b", "mom_err_p", "fitted"}, {x, y, fitted});
      std::cout << "plot data: plot_rate.csv\n";
      break;
    }
    case ExperimentKind::limit_law:
    case ExperimentKind::averaging_law: {
      const std::string oracle_name = manifest.at("outputs").at(1).get<std::string>();
      Table oracle = Table::read(dir / oracle_name);
      auto sample = column_values(results, "value");
      auto draws = column_values(oracle, "value");
      const KsResult ks = ks_two_sample(sample, draws);
      std::cout << "two-sample KS D = " << format_double(ks.statistic)
                << ", p = " << format_double(ks.p_value) << ", oracle draws = " << draws.size()
                << "\n";
      std::sort(sample.begin(), sample.end());
      std::sort(draws.begin(), draws.end());
      const std::size_t n = std::min(sample.size(), draws.size());
      std::vector<double> qs(n), qo(n);
      for (std::size_t i = 0; i < n; ++i) {
        qs[i] = sample[i * sample.size() / n];
        qo[i] = draws[i * draws.size() / n];
      }
      write_plot(dir / "plot_qq.csv", {"sample_quantile", "oracle_quantile"}, {qs, qo});
      std::cout << "plot data: plot_qq.csv\n";
      break;
    }
    case ExperimentKind::mean_measure: {
      for (const auto& row : results.rows) {
        std::cout << "N=" << row[0] << "  iterate " << row[1] << " -> " << row[2] << "  average "
                  << row[3] << " -> " << row[4] << "  characterization " << row[5] << " -> "
                  << row[6] << "\n";
      }
      write_plot(dir / "plot_mean_measure.csv", {"N", "iterate_sum", "iterate_target"},
                 {column_values(results, "N"), column_values(results, "iterate_sum"),
                  column_values(results, "iterate_target")});
      std::cout << "plot data: plot_mean_measure.csv\n";
      break;
    }
    case ExperimentKind::drift_check:
    case ExperimentKind::lemma_sweep: {
      for (const auto& row : results.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          std::cout << results.columns[c] << "=" << row[c] << (c + 1 < row.size() ? "  " : "\n");
      }
      break;
    }
    case ExperimentKind::complexity_table: {
      for (const auto& row : results.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          std::cout << results.columns[c] << "=" << row[c] << (c + 1 < row.size() ? "  " : "\n");
      }
      write_plot(dir / "plot_complexity.csv", {"r", "value"},
                 {column_values(results, "r"), column_values(results, "value")});
      std::cout << "plot data: plot_complexity.csv\n";
      break;
    }
  }

  std::ifstream summary(dir / "summary.json", std::ios::binary);
  if (summary) {
    json doc;
    summary >> doc;
    for (const auto& check : doc.at("checks"))
      std::cout << (check.at("pass").get<bool>() ? "[pass] " : "[FAIL] ")
                << check.at("name").get<std::string>() << " = "
                << check.at("value").get<std::string>() << " (target "
                << check.at("target").get<std::string>() << ")\n";
  }
  return 0;
}

}  // namespace htsgd
