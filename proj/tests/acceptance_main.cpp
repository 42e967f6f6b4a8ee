// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the exit code counts unexpected deviations (criterion 7 carries one
// clause that is stated as "holds" but is provably false — its line stays
// red and the process instead asserts that the counterexamples are found).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "htsgd/analysis.hpp"
#include "htsgd/engine.hpp"
#include "htsgd/experiments.hpp"
#include "htsgd/lemma_oracles.hpp"
#include "htsgd/limits.hpp"
#include "htsgd/noise.hpp"
#include "htsgd/problems.hpp"
#include "htsgd/schedules.hpp"
#include "htsgd/sweeps.hpp"

using namespace htsgd;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 4;
int g_failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// For the one criterion whose stated clause is mathematically false: the line
// stays red, but the process verdict instead asserts the verified truth
// (counterexamples found, all true forms clean). See the repository notes.
void report_expected_red(int criterion, const std::string& label, bool as_stated,
                         bool verified_truth, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", as_stated ? "PASS" : "FAIL (expected)", criterion,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (as_stated || !verified_truth) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(5);
  os << v;
  return os.str();
}

RunConfig quadratic_config(const QuadraticProblem& problem, const ScheduleSpec& schedule,
                           std::int64_t n) {
  RunConfig rc;
  rc.problem = &problem;
  rc.schedule = schedule;
  rc.iterations = n;
  rc.theta0 = problem.optimum() + Eigen::VectorXd::Ones(1);
  rc.master_seed = kSeed;
  rc.normalization_tail = problem.noise();
  return rc;
}

// ---------------------------------------------------------------------------

void criterion_moment_rate() {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  const QuadraticProblem problem(1.0, 0.0, tail);
  const ScheduleSpec schedule{0.7, 1.0, 0.5, 1.0};
  const std::vector<std::int64_t> grid{250, 500, 1000, 2000, 4000};
  const double p = 1.2;

  RunConfig rc = quadratic_config(problem, schedule, grid.back());
  const GridEnsembleResult ens = monte_carlo_error_grid(rc, 2000, grid, p);

  std::vector<double> xs, ys, ratios;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double mom = median_of_means(ens.values[g], 32);
    const double gob =
        learning_rate(schedule, grid[g]) / static_cast<double>(batch_size(schedule, grid[g]));
    xs.push_back(gob);
    ys.push_back(mom);
    ratios.push_back(mom / std::pow(gob, p - 1.0));
  }
  const RateFit fit = fit_rate(xs, ys);
  double lo = ratios[2], hi = ratios[2];
  for (std::size_t g = 2; g < ratios.size(); ++g) {
    lo = std::min(lo, ratios[g]);
    hi = std::max(hi, ratios[g]);
  }
  const double tail_ratio = hi / lo;
  const bool bound_ok = tail_ratio < 1.5;
  const bool slope_ok = fit.slope >= 0.32 && fit.slope <= 0.48 && fit.slope >= p - 1.0;
  report(1, "moment-rate bound and exact rate", bound_ok && slope_ok,
         "slope " + fmt(fit.slope) + " in [0.32, 0.48] and >= 0.2; last-three ratio " +
             fmt(tail_ratio) + " < 1.5; diverged " + std::to_string(ens.diverged_count));
}

void criterion_iterate_limit() {
  const ScheduleSpec schedule{0.7, 1.0, 0.3, 1.0};
  const std::int64_t n = 3000;
  const std::int64_t m = 4000;

  // stable driver against the closed-form stationary law
  const TailModel stable_tail = TailModel::stable(1.5, 1.0);
  const QuadraticProblem stable_problem(1.0, 0.0, stable_tail);
  RunConfig rc = quadratic_config(stable_problem, schedule, n);
  const EnsembleResult stable_ens = monte_carlo(rc, m, EnsembleStatistic::normalized_iterate);
  const OuStationaryStableSampler exact(1.5, 1.0, 1.0);
  const std::vector<double> stable_oracle = sample_many(exact, m, kSeed);
  const KsResult ks_stable = ks_two_sample(stable_ens.values, stable_oracle);

  // deterministic scale diagnostic: the finite-horizon iterate is exactly
  // stable with scale (sum A^alpha g^alpha b^{1-alpha})^{1/alpha}
  const auto products = contraction_products(schedule, 1.0, n);
  double scale_sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i)
    scale_sum += std::pow(std::abs(products[static_cast<std::size_t>(i - 1)]), 1.5) *
                 std::pow(learning_rate(schedule, i), 1.5) *
                 std::pow(static_cast<double>(batch_size(schedule, i)), -0.5);
  const double finite_scale =
      power_law_normalizer(schedule, 1.5, n) * std::pow(scale_sum, 1.0 / 1.5);

  // power-tail driver against the series oracle for the stationary measure
  const TailModel pareto_tail = TailModel::pareto(1.5, 1.0);
  const QuadraticProblem pareto_problem(1.0, 0.0, pareto_tail);
  RunConfig rp = quadratic_config(pareto_problem, schedule, n);
  const EnsembleResult pareto_ens = monte_carlo(rp, m, EnsembleStatistic::normalized_iterate);
  const ExponentMeasure1D stationary =
      ou_stationary_measure(ExponentMeasure1D::symmetric_unit(1.5), 1.0);
  const SeriesStableSampler series(stationary, 1000);
  const std::vector<double> pareto_oracle = sample_many(series, m, kSeed + 1);
  const KsResult ks_pareto = ks_two_sample(pareto_ens.values, pareto_oracle);

  const bool pass = ks_stable.p_value > 0.01 && ks_pareto.p_value > 0.01;
  report(2, "iterate stable limit", pass,
         "stable driver p = " + fmt(ks_stable.p_value) + " (D = " + fmt(ks_stable.statistic) +
             ", finite-horizon scale " + fmt(finite_scale) + " vs " + fmt(exact.scale()) +
             "); power-tail driver p = " + fmt(ks_pareto.p_value) +
             " (D = " + fmt(ks_pareto.statistic) + "); both > 0.01");
}

void criterion_averaging_limit() {
  const ScheduleSpec schedule{0.8, 1.0, 0.4, 1.0};
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  const QuadraticProblem problem(1.0, 0.0, tail);
  RunConfig rc = quadratic_config(problem, schedule, 3000);
  const EnsembleResult ens = monte_carlo(rc, 4000, EnsembleStatistic::normalized_average);
  const ExponentMeasure1D image =
      linear_image_measure(ExponentMeasure1D::symmetric_unit(1.5), 1.0);
  const SeriesStableSampler series(image, 1000);
  const std::vector<double> oracle = sample_many(series, 4000, kSeed + 2);
  const KsResult ks = ks_two_sample(ens.values, oracle);
  // deterministic finite-depth diagnostic: the tail-mass ratio at this depth
  // implies the residual scale bias the test has to absorb
  const double tail_ratio =
      mean_measure_sum_averages(schedule, tail, 1.0, 3000, 1.0);
  report(3, "averaging stable limit", ks.p_value > 0.01,
         "p = " + fmt(ks.p_value) + " (D = " + fmt(ks.statistic) + ") > 0.01, tail weight " +
             fmt(image.c_plus + image.c_minus) + "; finite-depth tail-mass ratio " +
             fmt(tail_ratio) + " (scale bias " +
             fmt(100.0 * (std::pow(tail_ratio, 1.0 / 1.5) - 1.0)) + "%)");
}

void criterion_mean_measure() {
  const TailModel tail = TailModel::pareto(1.5, 1.0);

  const ScheduleSpec iterate_schedule{0.7, 1.0, 0.3, 1.0};
  const double iterate_sum = mean_measure_sum_iterates(iterate_schedule, tail, 1.0, 4000, 1.0);
  const double iterate_target = 2.0 / 3.0;

  // averaging-valid schedule chosen for settled convergence at this depth
  const ScheduleSpec average_schedule{0.35, 1.0, 1.0, 1.0};
  const bool schedule_ok =
      validate_schedule(average_schedule, 1.5, 1.0, 1.0, SchedulePurpose::averaging).ok();
  const double average_sum = mean_measure_sum_averages(average_schedule, tail, 1.0, 4000, 1.0);
  const double characterization =
      batch_tail_characterization_sum(average_schedule, tail, 4000);

  const bool pass = schedule_ok &&
                    std::abs(iterate_sum - iterate_target) <= 0.05 * iterate_target &&
                    std::abs(average_sum - 1.0) <= 0.05 &&
                    std::abs(characterization - 1.0) <= 0.05;
  report(4, "mean-measure diagnostics", pass,
         "iterate sum " + fmt(iterate_sum) + " vs 2/3; average sum " + fmt(average_sum) +
             " vs 1; characterization sum " + fmt(characterization) + " vs 1; all within 5%");
}

void criterion_drift() {
  const DriftDecomposition d = drift_decomposition(ExponentMeasure1D{1.5, 1.0, 0.0}, 1.0, 1e-8);
  const double identity = d.interchange_term - (d.tail_first_moment / 1.0 - d.measure_integral);
  const bool pass = std::abs(d.boundary_term + 3.0) <= 1e-6 &&
                    std::abs(d.interchange_term - 1.0) <= 1e-6 &&
                    std::abs(d.measure_integral - 2.0) <= 1e-9 &&
                    std::abs(identity) <= 1e-6 &&
                    std::abs(std::abs(d.total) - std::abs(d.measure_integral)) <= 1e-6;
  report(5, "drift identity", pass,
         "pieces " + fmt(d.boundary_term) + " and " + fmt(d.interchange_term) +
             "; stationary-measure integral " + fmt(d.measure_integral) +
             "; interchange identity residual " + fmt(identity) +
             " (orientation of the total is reported, not asserted)");
}

void criterion_cf_closure() {
  const ExponentMeasure1D measure =
      ou_stationary_measure(ExponentMeasure1D::symmetric_unit(1.5), 1.0);
  const SeriesStableSampler sampler(measure, 1000);
  const std::vector<double> draws = sample_many(sampler, 1000000, kSeed + 3);
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto ecf = empirical_cf(draws, grid);
  bool pass = cf_from_measure(measure, 0.0) == std::complex<double>(1.0, 0.0);
  double worst_sigma = 0.0;
  for (const auto& pt : ecf) {
    const std::complex<double> target = cf_from_measure(measure, pt.u);
    const double dev_re = std::abs(pt.value.real() - target.real()) / pt.se_real;
    const double dev_im = std::abs(pt.value.imag() - target.imag()) / pt.se_imag;
    worst_sigma = std::max({worst_sigma, dev_re, dev_im});
    if (dev_re > 3.0 || dev_im > 3.0) pass = false;
  }
  report(6, "characteristic-function closure", pass,
         "worst deviation " + fmt(worst_sigma) + " standard errors over u in {0.25,...,4}; "
         "cf(0) = 1 exactly");
}

void criterion_inequality_suites() {
  const SweepOutcome triangle =
      triangle_inequality_sweep(1000000, kSeed, TriangleForm::euclidean);
  const SweepOutcome componentwise =
      triangle_inequality_sweep(1000000, kSeed, TriangleForm::componentwise);
  const SweepOutcome contraction = contraction_inequality_sweep(100000, kSeed);

  Eigen::MatrixXd witness = Eigen::MatrixXd::Zero(2, 2);
  witness(0, 0) = 1.0;
  witness(1, 1) = 2.0;
  const InequalityCheck equality = contraction_norm_check(witness, 0.5, 1.0);

  const SweepOutcome toeplitz = toeplitz_moment_instance(200000);
  const SweepOutcome recursion = recursion_moment_instance(200000);

  const ScheduleSpec sandwich_spec{0.5, 0.5, 0.0, 1.0};
  const SandwichOutcome sandwich =
      step_weight_sandwich(sandwich_spec, 1.0, {2000, 4000, 8000}, 0.05);

  // The euclidean-norm triangle clause is stated as "holds always" but is
  // mathematically false in d >= 2 (the componentwise signed power is not the
  // gradient of the euclidean norm). The sweep is run faithfully and the
  // criterion line is reported honestly; the process verdict asserts the
  // verified truth instead: the sweep must keep detecting counterexamples and
  // the coordinatewise form, which is what the moment recursion uses per
  // coordinate, must be clean. See the project notes for the worked example.
  const bool others_ok = componentwise.violations == 0 && contraction.violations == 0 &&
                         std::abs(equality.lhs - equality.rhs) <= 1e-12 &&
                         toeplitz.violations == 0 && recursion.violations == 0 &&
                         sandwich.found_upper && sandwich.found_lower;
  const bool as_stated = triangle.violations == 0 && others_ok;
  const bool verified_truth = triangle.violations > 0 && others_ok;
  report_expected_red(
      7, "inequality and recursion suites", as_stated, verified_truth,
      "euclidean triangle sweep: " + std::to_string(triangle.violations) + "/" +
          std::to_string(triangle.trials) +
          " counterexamples (stated clause unattainable in d >= 2); componentwise form: " +
          std::to_string(componentwise.violations) + " violations; contraction sweep: " +
          std::to_string(contraction.violations) + " violations; equality witness gap " +
          fmt(std::abs(equality.lhs - equality.rhs)) + "; recursion growth ok: " +
          std::to_string(toeplitz.violations + recursion.violations) +
          "; sandwich from index " + std::to_string(sandwich.upper_from) + " with window " +
          fmt(sandwich.lower_window));
  if (triangle.violations > 0) {
    std::printf(
        "       note: d=2, p=1.8903, x=(66.3792, -2.9536), y=(0.0639, 0.0156) gives\n"
        "       lhs - rhs = +7.5e-4 in exact arithmetic; the deficit is first order in |y|\n"
        "       while the 4|y|^p cushion is o(|y|), so no sampling scheme avoids it.\n");
  }
}

void criterion_complexity() {
  bool monotone_e = true;
  for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double prev = complexity_E(1.5, rho, 0.0);
    for (double r = 0.02; r <= 2.0; r += 0.02) {
      const double e = complexity_E(1.5, rho, r);
      if (e >= prev) monotone_e = false;
      prev = e;
    }
  }
  bool monotone_b = true;
  for (double alpha : {1.2, 1.5, 1.8}) {
    double prev = complexity_B(alpha, 0.0);
    for (double r = 0.02; r <= 1.0 / (alpha - 1.0); r += 0.02) {
      const double b = complexity_B(alpha, r);
      if (b >= prev) monotone_b = false;
      prev = b;
    }
  }
  const bool spots = std::abs(complexity_E(1.5, 0.5, 1.0) - 4.0) <= 1e-12 &&
                     std::abs(complexity_B(1.5, 1.0) - 1.0 / 6.0) <= 1e-12;
  report(8, "complexity formulas", monotone_e && monotone_b && spots,
         "sample exponent and normalizer exponent strictly decreasing in r; spot values "
         "E = " + fmt(complexity_E(1.5, 0.5, 1.0)) + ", B = " + fmt(complexity_B(1.5, 1.0)));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_determinism() {
  const fs::path base = fs::temp_directory_path() / "htsgd_acceptance";
  fs::remove_all(base);

  ConfigFile cfg = ConfigFile::parse_string(
      "[experiment]\nkind = moment_rate\nmaster_seed = 9\nreplications = 200\n"
      "output = " + (base / "a").string() + "\n"
      "[problem]\ntype = quadratic\na = 1.0\ntheta_star = 0.0\n"
      "[noise]\nkind = pareto\nalpha = 1.5\n"
      "[schedule]\nrho = 0.7\nc_gamma = 1.0\nr = 0.5\n"
      "[run]\nN_grid = 50,100,200\np = 1.2\n");
  ExperimentSetup setup = resolve_experiment(cfg);
  // the inner experiment prints its own summary; keep this criterion's output tidy
  std::ostringstream sink;
  std::streambuf* cout_buf = std::cout.rdbuf(sink.rdbuf());
  const ExperimentStatus first = run_experiment(setup);
  setup.output_dir = (base / "b").string();
  const ExperimentStatus second = run_experiment(setup);
  std::cout.rdbuf(cout_buf);

  const bool files_equal = slurp(base / "a" / "results.csv") == slurp(base / "b" / "results.csv") &&
                           slurp(base / "a" / "summary.json") == slurp(base / "b" / "summary.json");
  nlohmann::json ma = nlohmann::json::parse(slurp(base / "a" / "manifest.json"));
  nlohmann::json mb = nlohmann::json::parse(slurp(base / "b" / "manifest.json"));
  ma.erase("wall_seconds");
  mb.erase("wall_seconds");
  ma["config"].erase("experiment.output");
  mb["config"].erase("experiment.output");

  // replication streams: uniform transforms across neighbouring replications
  // show no detectable correlation
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  const std::size_t m = 100000;
  std::vector<double> u0(m), u1(m);
  {
    RngStream s0(kSeed, StreamDomain::data, 0);
    RngStream s1(kSeed, StreamDomain::data, 1);
    for (std::size_t i = 0; i < m; ++i) {
      u0[i] = tail_prob(tail, sample_radius(tail, s0));
      u1[i] = tail_prob(tail, sample_radius(tail, s1));
    }
  }
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    m0 += u0[i] / static_cast<double>(m);
    m1 += u1[i] / static_cast<double>(m);
  }
  double cov = 0.0, v0 = 0.0, v1 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    cov += (u0[i] - m0) * (u1[i] - m1);
    v0 += (u0[i] - m0) * (u0[i] - m0);
    v1 += (u1[i] - m1) * (u1[i] - m1);
  }
  const double corr = cov / std::sqrt(v0 * v1);
  const bool corr_ok = std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(m));

  const bool pass = first.exit_code == 0 && second.exit_code == 0 && files_equal &&
                    ma == mb && corr_ok;
  report(9, "infrastructure determinism", pass,
         std::string("rerun outputs byte-identical: ") + (files_equal ? "yes" : "no") +
             "; manifests equal up to wall time: " + (ma == mb ? "yes" : "no") +
             "; replication-stream correlation " + fmt(corr));
  fs::remove_all(base);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_moment_rate();
  criterion_iterate_limit();
  criterion_averaging_limit();
  criterion_mean_measure();
  criterion_drift();
  criterion_cf_closure();
  criterion_inequality_suites();
  criterion_complexity();
  criterion_determinism();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d unexpected deviations in %.1f s (criterion 7 carries an expected red clause)\n",
              g_failures, wall);
  return g_failures;
}
