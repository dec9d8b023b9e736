#ifndef PEFL_SCENARIO_H_
#define PEFL_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pefl/attack_report.h"
#include "pefl/gradient_matrix.h"
#include "pefl/he.h"
#include "pefl/pad_set.h"
#include "pefl/pipeline.h"
#include "pefl/verify.h"
#include "pefl/weight.h"

namespace pefl {

enum class HonestModel { kClusteredGaussian, kLinearTask };
enum class PoisonKind { kNone, kSignFlip, kScale, kGaussianNoise };

std::string_view honest_model_name(HonestModel model);
HonestModel parse_honest_model(std::string_view name);
std::string_view poison_kind_name(PoisonKind kind);
PoisonKind parse_poison_kind(std::string_view name);

struct ScenarioConfig {
  std::size_t m = 10;
  std::size_t n = 32;
  HonestModel honest_model = HonestModel::kClusteredGaussian;
  PoisonKind poison = PoisonKind::kSignFlip;
  // Scale factor for kScale, noise sigma for kGaussianNoise.
  double poison_parameter = 0.0;
  double poison_fraction = 0.2;
  // Spread of honest users around the shared base direction.
  double honest_noise = 0.3;
  // Samples per user for kLinearTask.
  std::size_t linear_samples = 64;
  int pad_bits = kDefaultPadBits;
  int scale_bits = kDefaultScaleBits;
  int value_bits = kDefaultValueBits;
  Backend backend = Backend::kTransparent;
  int key_bits = kDefaultKeyBits;
  std::string weight_function{kDefaultWeightFunction};
  // CP joins the round as one extra honest user (row m) so the
  // register-as-user attack has its own row.
  bool cp_registers = true;
  std::uint64_t master_seed = 42;

  // Throws kInvalidArgument on m < 3, n < 2, poison_fraction outside
  // [0, 1) or poisoners not a strict minority.
  void validate() const;
  std::size_t poisoned_count() const;
  PipelineConfig pipeline() const;

  bool operator==(const ScenarioConfig&) const = default;
};

struct Population {
  GradientMatrix gradients;
  std::vector<bool> poisoned;
  // Direction honest users cluster around (decoded reals).
  std::vector<double> base;
  std::optional<std::size_t> cp_row;
};

// Honest rows around a shared direction, then poison applied to a
// seed-chosen subset of the first m rows. Deterministic in `seed`.
Population gen_population(const ScenarioConfig& config, std::uint64_t seed);

inline constexpr std::string_view kAttackIds[] = {
    "combined", "cp-user", "single-known", "probabilistic", "secmed-diffs"};
bool is_attack_id(std::string_view id);

struct AttackOutcome {
  std::string id;
  double coverage = 0.0;
  Verdict verdict;
  std::vector<std::size_t> unrecovered_rows;
  // Probabilistic attack only.
  std::size_t constraints = 0;
  std::vector<std::string> diagnostics;
};

struct DefenseMetrics {
  double honest_min_weight = 0.0;
  double honest_mean_weight = 0.0;
  double poisoned_max_weight = 0.0;
  std::optional<double> poisoned_max_rho;
  bool poisoned_all_zero = true;
  std::optional<double> aggregate_rho_with_base;
  bool all_weights_zero = false;
};

struct FixVariantDeltas {
  double secmed_wrong_fraction = 0.0;
  double secmed_wrong_fraction_selected_pad = 0.0;
  Wide secmed_max_delta = 0;
  double secpear_mean_delta = 0.0;
  double secpear_max_delta = 0.0;
};

struct TrialOutcome {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  Population population;
  RoundResult round;
  std::vector<AttackOutcome> attacks;
  DefenseMetrics defense;
  FixVariantDeltas fix;
};

std::uint64_t trial_seed(const ScenarioConfig& config, std::size_t trial_index);

// population -> run_round -> attacks -> verify_recovery -> defense metrics
// -> fix-variant deltas. A pure function of (config, trial_index, attacks).
TrialOutcome run_trial(const ScenarioConfig& config, std::size_t trial_index,
                       const std::vector<std::string>& attacks = {
                           std::begin(kAttackIds), std::end(kAttackIds)});

// run_trial on a caller-supplied population (e.g. a crafted instance).
TrialOutcome run_trial_on(const ScenarioConfig& config, std::size_t trial_index,
                          std::uint64_t seed, Population population,
                          const std::vector<std::string>& attacks);

// Runs trials 0..count-1 on up to `max_threads` threads; the output order is
// the trial order regardless of scheduling.
std::vector<TrialOutcome> run_trials(const ScenarioConfig& config,
                                     std::size_t count,
                                     const std::vector<std::string>& attacks,
                                     unsigned max_threads);

}  // namespace pefl

#endif  // PEFL_SCENARIO_H_
