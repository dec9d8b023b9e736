#ifndef PEFL_CLI_H_
#define PEFL_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pefl/error.h"
#include "pefl/he.h"
#include "pefl/scenario.h"

namespace pefl::cli {

inline constexpr std::string_view kToolName = "pefl-sim";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
// Environment variable capping worker threads for `simulate`.
inline constexpr const char* kMaxThreadsEnv = "PEFL_MAX_THREADS";

struct RunConfig {
  ScenarioConfig scenario;
  std::size_t trials = 10;
  std::vector<std::string> attacks{std::begin(kAttackIds), std::end(kAttackIds)};
  std::string output;  // empty: caller decides

  bool operator==(const RunConfig&) const = default;
};

// Every field is optional and defaults as in RunConfig; unknown fields,
// wrong types, trials < 1, unknown attack ids and invalid scenarios raise
// Error(kConfigParse).
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

// Report document for a set of trials. Contains a `generated_at` timestamp
// that is the only non-deterministic field.
nlohmann::json build_report(const RunConfig& config, std::string_view command,
                            const std::vector<TrialOutcome>& trials);
// Report with `generated_at` removed, for determinism comparisons.
nlohmann::json report_payload(nlohmann::json report);

// UTF-8 JSON, two-space indent, trailing newline. Throws Error(kIo).
void write_json(const nlohmann::json& j, const std::string& path);

struct SimulateOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out_path;
  std::optional<unsigned> max_threads;  // else kMaxThreadsEnv, else hardware
};

// Runs the configured trials, writes the report to the output path (if
// any) and prints one `attack=<id> ...` summary line per attack.
nlohmann::json cmd_simulate(const SimulateOptions& options, std::ostream& out);

struct AttackOptions {
  std::string which;
  std::uint64_t seed = 42;
  std::size_t m = 10;
  std::size_t n = 32;
  Backend backend = Backend::kTransparent;
  int key_bits = kDefaultKeyBits;
  // Overwrite this row with a constant before the round.
  std::optional<std::size_t> constant_row;
  std::optional<std::string> out_path;
};

// Single focused trial of one attack with verbose diagnostics. Throws
// Error(kUnknownAttack) for an unknown id.
nlohmann::json cmd_attack(const AttackOptions& options, std::ostream& out);

struct FixcheckOptions {
  std::string variant;
  std::uint64_t seed = 42;
  std::optional<std::size_t> samples;  // 1000 coordinates / 100 instances
  std::optional<std::string> out_path;
};

// Monte Carlo for "secmed-distinct" or "secpear-distinct". Throws
// Error(kUnknownVariant) otherwise.
nlohmann::json cmd_fixcheck(const FixcheckOptions& options, std::ostream& out);

// 0 is success; every error code maps to a distinct nonzero status.
int exit_code_for(ErrorCode code);

}  // namespace pefl::cli

#endif  // PEFL_CLI_H_
