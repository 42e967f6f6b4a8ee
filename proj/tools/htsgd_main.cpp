// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <string>

#include "htsgd/experiments.hpp"
#include "htsgd/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"htsgd: mini-batch SGD under heavy-tailed gradient noise"};
  app.set_version_flag("--version", std::string(htsgd::kVersion));
  app.require_subcommand(1);

  std::string run_path, validate_path, seeds_path, report_dir;
  auto* run = app.add_subcommand("run", "execute an experiment config (or a manifest.json)");
  run->add_option("config", run_path, "config or manifest path")->required();
  auto* validate = app.add_subcommand("validate", "check the schedule conditions of a config");
  validate->add_option("config", validate_path, "config or manifest path")->required();
  auto* seeds = app.add_subcommand("seeds", "print the derived stream seeds of a config");
  seeds->add_option("config", seeds_path, "config or manifest path")->required();
  auto* report = app.add_subcommand("report", "summarize a results directory");
  report->add_option("dir", report_dir, "directory written by `run`")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return htsgd::cli_run(run_path);
  if (validate->parsed()) return htsgd::cli_validate(validate_path);
  if (seeds->parsed()) return htsgd::cli_seeds(seeds_path);
  if (report->parsed()) return htsgd::cli_report(report_dir);
  return 1;
}
