#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pefl/cli.h"
#include "pefl/error.h"
#include "pefl/he.h"

int main(int argc, char** argv) {
  namespace cli = pefl::cli;
  CLI::App app{"Simulator and adversary for padded-HE federated aggregation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cli::kToolVersion));

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run seeded trials and write a JSON report");
  simulate->add_option("--config", sim.config_path, "Config JSON file")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Master seed (overrides config)");
  simulate->add_option("--trials", sim.trials, "Trial count (overrides config)");
  simulate->add_option("--out", sim.out_path, "Report path (overrides config)");
  simulate->add_option("--threads", sim.max_threads,
                       std::string("Worker threads (default: $") + cli::kMaxThreadsEnv +
                           " or hardware concurrency)");

  cli::AttackOptions atk;
  std::string backend = "transparent";
  auto* attack = app.add_subcommand("attack", "Run one attack on one trial, verbosely");
  attack->add_option("--which", atk.which, "combined|cp-user|single-known|probabilistic|secmed-diffs")
      ->required();
  attack->add_option("--seed", atk.seed, "Master seed");
  attack->add_option("--m", atk.m, "Users");
  attack->add_option("--n", atk.n, "Gradient dimension");
  attack->add_option("--backend", backend, "transparent|paillier");
  attack->add_option("--key-bits", atk.key_bits, "Paillier modulus bits");
  attack->add_option("--constant-row", atk.constant_row,
                     "Make this row constant before the round");
  attack->add_option("--out", atk.out_path, "Report path");

  cli::FixcheckOptions fix;
  auto* fixcheck = app.add_subcommand("fixcheck", "Monte Carlo for the distinct-pad repairs");
  fixcheck->add_option("--variant", fix.variant, "secmed-distinct|secpear-distinct")->required();
  fixcheck->add_option("--seed", fix.seed, "Seed");
  fixcheck->add_option("--samples", fix.samples, "Coordinates (secmed) or instances (secpear)");
  fixcheck->add_option("--out", fix.out_path, "Report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      cli::cmd_simulate(sim, std::cout);
    } else if (*attack) {
      atk.backend = pefl::parse_backend(backend);
      cli::cmd_attack(atk, std::cout);
    } else if (*fixcheck) {
      cli::cmd_fixcheck(fix, std::cout);
    }
  } catch (const pefl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
