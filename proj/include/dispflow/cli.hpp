// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file cli.hpp
/// @brief Command-line front end: run, study, verify, presets.
///
/// Exit status: 0 success, 1 failed checks or blow-up, 2 usage error.

#include "dispflow/output.hpp"

#include "CLI11.hpp"

#include <iomanip>
#include <iostream>
#include <sstream>

namespace dispflow {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitUsage = 2 };

struct CliStreams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline RunConfig load_config(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const ConfigError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline void print_checks(std::ostream& out, const StudyResult& r) { out << study_summary(r); }

}  // namespace detail

inline const std::vector<std::string>& study_names() {
  static const std::vector<std::string> names{"convergence", "epsilon", "stability", "identities"};
  return names;
}

struct SuiteOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<RunConfig> base;  // overrides the default base of a single study
};

/// Runs one named study with its default setup.
inline StudyResult run_study(const std::string& name, const SuiteOptions& opt) {
  const auto with_seed = [&](RunConfig c) {
    if (opt.seed) c.initial.seed = *opt.seed;
    return c;
  };
  if (name == "convergence") {
    ConvergenceOptions o;
    o.base = with_seed(opt.base ? *opt.base : default_convergence_base());
    o.jobs = opt.jobs;
    return convergence_study(o);
  }
  if (name == "epsilon") {
    EpsilonOptions o;
    o.base = with_seed(opt.base ? *opt.base : default_epsilon_base());
    o.jobs = opt.jobs;
    return epsilon_study(o);
  }
  if (name == "stability") {
    StabilityOptions o;
    o.base = with_seed(opt.base ? *opt.base : default_stability_base());
    o.jobs = opt.jobs;
    return stability_study(o);
  }
  if (name == "identities") {
    IdentityOptions o;
    if (opt.seed) o.base_seed = *opt.seed;
    if (opt.base) o.target = opt.base->target.make();
    o.jobs = opt.jobs;
    return identity_suite(o);
  }
  throw detail::UsageError("unknown study '" + name + "' (expected convergence, epsilon, stability, identities, or all)");
}

/// Manifest config for a study invocation. Deliberately excludes --jobs.
inline json study_config(const std::vector<std::string>& names, const SuiteOptions& opt) {
  json c = {{"studies", names}};
  c["seed"] = opt.seed ? json(*opt.seed) : json(nullptr);
  c["base"] = opt.base ? config_to_json(*opt.base) : json(nullptr);
  return c;
}

inline std::string presets_table() {
  std::ostringstream out;
  out << std::left << std::setw(24) << "name" << std::setw(28) << "(a, b, c, lambda)" << "constraint\n";
  for (const auto& p : presets()) {
    std::ostringstream tuple;
    tuple << '(' << p.params.a << ", " << p.params.b << ", " << p.params.c << ", " << p.params.lambda << ')';
    out << std::setw(24) << p.name << std::setw(28) << tuple.str() << p.constraint << '\n';
  }
  return out.str();
}

inline int run_cli(std::vector<std::string> args, CliStreams io = {}) {
  CLI::App app{"dispflow: fourth-order dispersive curve flows on surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DISPFLOW_VERSION));

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quiet = false;
  std::string study_name;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the random seed");
    sub->add_option("--jobs", jobs, "parallel study cases")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "integrate one config");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  add_common(run_cmd);

  CLI::App* study_cmd = app.add_subcommand("study", "run a named study");
  study_cmd->add_option("name", study_name, "convergence | epsilon | stability | identities | all")
      ->required();
  study_cmd->add_option("--config", config_path, "base config for a single study");
  add_common(study_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the identity suite");
  add_common(verify_cmd);

  CLI::App* presets_cmd = app.add_subcommand("presets", "list parameter presets");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    io.out << DISPFLOW_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (presets_cmd->parsed()) {
      io.out << presets_table();
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      RunConfig cfg = detail::load_config(config_path);
      if (seed) cfg.initial.seed = *seed;
      const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
      try {
        const Trajectory traj = run(cfg);
        write_trajectory(dir, traj);
        if (!quiet) {
          io.out << "run: " << traj.steps << " steps, dt = " << format_number(traj.dt) << ", rhs "
                 << to_string(traj.rhs) << ", wrote " << dir.string() << '\n';
          if (traj.n4_doubling_time) {
            io.out << "note: N_4 doubled by t = " << format_number(*traj.n4_doubling_time) << '\n';
          }
        }
        return kExitOk;
      } catch (const RunBlowUp& e) {
        write_trajectory(dir, e.partial());
        io.err << "blow-up: " << e.what() << " (partial output in " << dir.string() << ")\n";
        return kExitFailed;
      }
    }

    SuiteOptions opt;
    opt.jobs = jobs;
    opt.seed = seed;
    std::vector<std::string> names;
    fs::path dir;
    if (verify_cmd->parsed()) {
      names = {"identities"};
      dir = out_dir;
    } else {
      if (study_name == "all") {
        if (!config_path.empty()) throw detail::UsageError("--config applies to a single study, not 'all'");
        names = study_names();
      } else {
        if (std::find(study_names().begin(), study_names().end(), study_name) == study_names().end()) {
          throw detail::UsageError("unknown study '" + study_name +
                                   "' (expected convergence, epsilon, stability, identities, or all)");
        }
        names = {study_name};
        if (!config_path.empty()) opt.base = detail::load_config(config_path);
      }
      dir = out_dir.empty() ? fs::path("out") / ("study-" + study_name) : fs::path(out_dir);
    }

    std::vector<StudyResult> results;
    bool ok = true;
    for (const auto& name : names) {
      results.push_back(run_study(name, opt));
      ok = ok && results.back().passed();
      if (!quiet) detail::print_checks(io.out, results.back());
    }
    if (!dir.empty()) write_studies(dir, results, study_config(names, opt));
    return ok ? kExitOk : kExitFailed;
  } catch (const detail::UsageError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

inline int run_cli(int argc, char** argv, CliStreams io = {}) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), io);
}

}  // namespace dispflow
