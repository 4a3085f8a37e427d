/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <cstdlib>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rofsim/cli.hpp"

namespace {

unsigned threads_from_env() {
  if (const char* env = std::getenv("ROFSIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw != 0 ? hw : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duplex radio-over-fiber fronthaul link simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  rofsim::RunFlags flags;
  std::uint64_t seed_arg = 0;
  std::size_t symbols_arg = 0;

  auto add_common = [&](CLI::App* cmd, bool with_run_flags) {
    cmd->add_option("--config", config_path, "JSON config file (defaults when omitted)");
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    if (with_run_flags) {
      cmd->add_option("--symbols", symbols_arg, "QAM symbols to simulate");
      cmd->add_flag("--no-noise", flags.no_noise, "disable all noise and penalties");
    }
  };

  CLI::App* run = app.add_subcommand("run", "simulate one duplex link transaction");
  add_common(run, true);
  run->add_option("--seed", seed_arg, "override the scenario seed")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--iq-dump", flags.iq_dump, "write tap waveforms as .rfiq files");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep a parameter across values x seeds");
  add_common(sweep, true);

  CLI::App* calibrate = app.add_subcommand("calibrate", "fit free parameters to targets");
  add_common(calibrate, false);

  app.add_subcommand("schema", "print the config schema and artifact formats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rofsim::kExitError;
  }

  if (run->parsed()) {
    if (run->count("--seed") > 0) flags.seed = seed_arg;
    if (run->count("--symbols") > 0) flags.symbols = symbols_arg;
    return rofsim::cmd_run(config_path, out_dir, flags);
  }
  if (sweep->parsed()) {
    if (sweep->count("--symbols") > 0) flags.symbols = symbols_arg;
    return rofsim::cmd_sweep(config_path, out_dir, flags, threads_from_env());
  }
  if (calibrate->parsed()) {
    return rofsim::cmd_calibrate(config_path, out_dir);
  }
  return rofsim::cmd_schema();
}
