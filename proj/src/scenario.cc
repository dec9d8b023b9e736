#include "pefl/scenario.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "pefl/attacks.h"
#include "pefl/error.h"
#include "pefl/fix_variants.h"
#include "pefl/stats.h"

namespace pefl {
namespace {

enum Stream : std::uint64_t {
  kBaseStream = 11,
  kHonestStream = 12,
  kPoisonStream = 13,
  kRoundStream = 14,
  kAnchorStream = 15,
  kFixStream = 16,
};

std::vector<double> gaussian_vector(std::size_t n, double sigma, Rng& rng) {
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(n);
  for (auto& e : v) e = dist(rng);
  return v;
}

// Gradient of the mean squared error of a linear model at w = 0 on fresh
// per-user data drawn around the true weights.
std::vector<double> linear_task_gradient(const std::vector<double>& true_w,
                                         std::size_t samples, Rng& rng) {
  const std::size_t n = true_w.size();
  std::normal_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> label_noise(0.0, 0.1);
  std::vector<double> grad(n, 0.0);
  std::vector<double> features(n);
  for (std::size_t k = 0; k < samples; ++k) {
    double y = label_noise(rng);
    for (std::size_t i = 0; i < n; ++i) {
      features[i] = unit(rng);
      y += features[i] * true_w[i];
    }
    // residual at w = 0 is -y
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] += -2.0 * y * features[i] / static_cast<double>(samples);
    }
  }
  return grad;
}

std::vector<std::int64_t> encode_row(const std::vector<double>& values,
                                     const ScenarioConfig& config) {
  std::vector<std::int64_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw[i] = encode_fixed(values[i], config.scale_bits, config.value_bits).raw;
  }
  return raw;
}

DefenseMetrics defense_metrics(const Population& pop, const RoundResult& round) {
  DefenseMetrics d;
  d.all_weights_zero = round.all_weights_zero;
  double honest_sum = 0.0;
  std::size_t honest_count = 0;
  d.honest_min_weight = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < pop.poisoned.size(); ++x) {
    const double w = round.weights[x];
    if (pop.poisoned[x]) {
      d.poisoned_max_weight = std::max(d.poisoned_max_weight, w);
      if (w != 0.0) d.poisoned_all_zero = false;
      if (round.rho[x]) {
        d.poisoned_max_rho =
            std::max(d.poisoned_max_rho.value_or(-1.0), *round.rho[x]);
      }
    } else {
      d.honest_min_weight = std::min(d.honest_min_weight, w);
      honest_sum += w;
      ++honest_count;
    }
  }
  if (honest_count == 0) d.honest_min_weight = 0.0;
  d.honest_mean_weight =
      honest_count == 0 ? 0.0 : honest_sum / static_cast<double>(honest_count);
  if (!round.all_weights_zero) {
    try {
      d.aggregate_rho_with_base = pearson(
          std::span<const double>(round.aggregate.decoded()),
          std::span<const double>(pop.base));
    } catch (const Error&) {
      d.aggregate_rho_with_base = std::nullopt;
    }
  }
  return d;
}

// First nonzero entry at a seed-chosen starting position, scanning row-major.
SideInformation pick_anchor(const GradientMatrix& g, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t total = g.m() * g.n();
  const std::size_t start =
      static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(total) - 1));
  for (std::size_t step = 0; step < total; ++step) {
    const std::size_t k = (start + step) % total;
    const std::size_t x = k / g.n();
    const std::size_t i = k % g.n();
    if (g(x, i) != 0) return SingleEntry{x, i, g(x, i)};
  }
  return SingleEntry{0, 0, 0};
}

AttackOutcome outcome_from(std::string id, AttackReport& report,
                           const GradientMatrix& truth) {
  AttackOutcome out;
  out.id = std::move(id);
  out.verdict = verify_recovery(report, truth);
  out.coverage = out.verdict.coverage;
  out.unrecovered_rows = report.unrecovered_rows;
  out.diagnostics = report.diagnostics;
  return out;
}

}  // namespace

std::string_view honest_model_name(HonestModel model) {
  return model == HonestModel::kLinearTask ? "linear_task"
                                           : "clustered_gaussian";
}

HonestModel parse_honest_model(std::string_view name) {
  if (name == "clustered_gaussian") return HonestModel::kClusteredGaussian;
  if (name == "linear_task") return HonestModel::kLinearTask;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown honest model '" + std::string(name) + "'");
}

std::string_view poison_kind_name(PoisonKind kind) {
  switch (kind) {
    case PoisonKind::kNone: return "none";
    case PoisonKind::kSignFlip: return "sign_flip";
    case PoisonKind::kScale: return "scale";
    case PoisonKind::kGaussianNoise: return "gaussian_noise";
  }
  return "none";
}

PoisonKind parse_poison_kind(std::string_view name) {
  if (name == "none") return PoisonKind::kNone;
  if (name == "sign_flip") return PoisonKind::kSignFlip;
  if (name == "scale") return PoisonKind::kScale;
  if (name == "gaussian_noise") return PoisonKind::kGaussianNoise;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown poison kind '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (m < 3) fail("m must be >= 3");
  if (n < 2) fail("n must be >= 2");
  if (!(poison_fraction >= 0.0 && poison_fraction < 1.0)) {
    fail("poison_fraction must be in [0, 1)");
  }
  if (2 * poisoned_count() >= m) fail("poisoners must be a strict minority");
  if (pad_bits < 1 || pad_bits > 62) fail("pad_bits must be in [1, 62]");
  if (scale_bits < 0 || value_bits > 62 || value_bits <= scale_bits + 1) {
    fail("bad fixed-point format");
  }
  if (honest_noise < 0.0 || !std::isfinite(honest_noise)) {
    fail("honest_noise must be finite and >= 0");
  }
  if (honest_model == HonestModel::kLinearTask && linear_samples == 0) {
    fail("linear_samples must be positive");
  }
  if (backend == Backend::kPaillier && key_bits < 512) {
    fail("paillier key_bits must be >= 512");
  }
  weight_function_by_id(weight_function);
}

std::size_t ScenarioConfig::poisoned_count() const {
  return static_cast<std::size_t>(
      std::floor(poison_fraction * static_cast<double>(m)));
}

PipelineConfig ScenarioConfig::pipeline() const {
  PipelineConfig p;
  p.format = FixedPointFormat{scale_bits, value_bits};
  p.pad_bits = pad_bits;
  p.backend = backend;
  p.key_bits = key_bits;
  p.weight = weight_function_by_id(weight_function);
  return p;
}

Population gen_population(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t rows = config.m + (config.cp_registers ? 1 : 0);
  Rng base_rng(derive_seed(seed, kBaseStream));
  Rng honest_rng(derive_seed(seed, kHonestStream));
  Rng poison_rng(derive_seed(seed, kPoisonStream));

  Population pop;
  pop.gradients = GradientMatrix{Matrix<std::int64_t>(rows, config.n),
                                 config.scale_bits};
  pop.poisoned.assign(rows, false);
  if (config.cp_registers) pop.cp_row = config.m;

  std::vector<double> true_w;
  if (config.honest_model == HonestModel::kClusteredGaussian) {
    pop.base = gaussian_vector(config.n, 1.0, base_rng);
  } else {
    true_w = gaussian_vector(config.n, 1.0, base_rng);
    pop.base.resize(config.n);
    for (std::size_t i = 0; i < config.n; ++i) pop.base[i] = -2.0 * true_w[i];
  }

  std::vector<std::size_t> order(config.m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), poison_rng);
  if (config.poison != PoisonKind::kNone) {
    for (std::size_t k = 0; k < config.poisoned_count(); ++k) {
      pop.poisoned[order[k]] = true;
    }
  }

  for (std::size_t x = 0; x < rows; ++x) {
    std::vector<double> row;
    if (config.honest_model == HonestModel::kClusteredGaussian) {
      row = gaussian_vector(config.n, config.honest_noise, honest_rng);
      for (std::size_t i = 0; i < config.n; ++i) row[i] += pop.base[i];
    } else {
      row = linear_task_gradient(true_w, config.linear_samples, honest_rng);
    }
    if (pop.poisoned[x]) {
      switch (config.poison) {
        case PoisonKind::kNone:
          break;
        case PoisonKind::kSignFlip:
          for (auto& v : row) v = -v;
          break;
        case PoisonKind::kScale:
          for (auto& v : row) v *= config.poison_parameter;
          break;
        case PoisonKind::kGaussianNoise: {
          std::normal_distribution<double> noise(0.0, config.poison_parameter);
          for (auto& v : row) v += noise(poison_rng);
          break;
        }
      }
    }
    const auto raw = encode_row(row, config);
    std::copy(raw.begin(), raw.end(), pop.gradients.values.row(x).begin());
  }
  return pop;
}

bool is_attack_id(std::string_view id) {
  return std::find(std::begin(kAttackIds), std::end(kAttackIds), id) !=
         std::end(kAttackIds);
}

std::uint64_t trial_seed(const ScenarioConfig& config, std::size_t trial_index) {
  return derive_seed(config.master_seed, trial_index);
}

TrialOutcome run_trial(const ScenarioConfig& config, std::size_t trial_index,
                       const std::vector<std::string>& attacks) {
  const std::uint64_t seed = trial_seed(config, trial_index);
  return run_trial_on(config, trial_index, seed, gen_population(config, seed),
                      attacks);
}

TrialOutcome run_trial_on(const ScenarioConfig& config, std::size_t trial_index,
                          std::uint64_t seed, Population population,
                          const std::vector<std::string>& attacks) {
  for (const auto& id : attacks) {
    if (!is_attack_id(id)) {
      throw Error(ErrorCode::kUnknownAttack, "unknown attack '" + id + "'");
    }
  }
  TrialOutcome out;
  out.trial_index = trial_index;
  out.seed = seed;
  out.population = std::move(population);
  const GradientMatrix& g = out.population.gradients;
  out.round = run_round(g, config.pipeline(), derive_seed(out.seed, kRoundStream));
  const CloudViews& views = out.round.views;
  const SideInformation anchor =
      pick_anchor(g, derive_seed(out.seed, kAnchorStream));

  for (const auto& id : attacks) {
    if (id == "combined") {
      AttackReport report = attack_combined(views);
      out.attacks.push_back(outcome_from(id, report, g));
    } else if (id == "cp-user") {
      if (!out.population.cp_row) continue;
      const std::size_t row = *out.population.cp_row;
      OwnRow own{row, std::vector<std::int64_t>(g.values.row(row).begin(),
                                                g.values.row(row).end())};
      AttackReport report =
          attack_cp_as_user(views.secmed, own, config.value_bits);
      out.attacks.push_back(outcome_from(id, report, g));
    } else if (id == "single-known") {
      AttackReport report =
          attack_single_known(views.secmed, views.secpear, anchor);
      out.attacks.push_back(outcome_from(id, report, g));
    } else if (id == "probabilistic") {
      ProbabilisticResult result =
          attack_probabilistic(views.secmed, views.secpear, anchor);
      AttackOutcome o = outcome_from(id, result.report, g);
      o.constraints = result.constraints.size();
      out.attacks.push_back(std::move(o));
    } else if (id == "secmed-diffs") {
      const auto diffs = attack_secmed_diffs(views.secmed);
      AttackOutcome o;
      o.id = id;
      for (std::size_t i = 0; i < diffs.size(); ++i) {
        for (const auto& d : diffs[i]) {
          ++o.verdict.recovered;
          const Wide truth = static_cast<Wide>(g(d.x, i)) - g(d.z, i);
          ++(d.diff == truth ? o.verdict.exact : o.verdict.inexact);
        }
      }
      o.coverage = o.verdict.recovered == 0 ? 0.0 : 1.0;
      o.verdict.coverage = o.coverage;
      out.attacks.push_back(std::move(o));
    }
  }

  out.defense = defense_metrics(out.population, out.round);

  Rng fix_rng(derive_seed(out.seed, kFixStream));
  const std::int64_t pad_hi = (std::int64_t{1} << config.pad_bits) - 1;
  const auto med_pads = sample_pad_matrix(g.m(), g.n(), 0, pad_hi, fix_rng);
  const SecMedFixResult blind = fix_variant_secmed(g, med_pads);
  const SecMedFixResult selected =
      fix_variant_secmed(g, med_pads, UnpadRule::kSelectedUserPad);
  out.fix.secmed_wrong_fraction = blind.wrong_fraction;
  out.fix.secmed_wrong_fraction_selected_pad = selected.wrong_fraction;
  out.fix.secmed_max_delta =
      blind.delta.empty() ? 0 : *std::max_element(blind.delta.begin(), blind.delta.end());
  const std::int64_t pear_hi = std::int64_t{1} << kSecPearFixPadBits;
  const auto pear_pads = sample_pad_matrix(g.m(), g.n(), 1, pear_hi, fix_rng);
  const auto median_pads = sample_pad_matrix(1, g.n(), 1, pear_hi, fix_rng);
  try {
    const SecPearFixResult pear = fix_variant_secpear(
        g, pear_pads,
        std::vector<std::int64_t>(median_pads.row(0).begin(),
                                  median_pads.row(0).end()));
    out.fix.secpear_mean_delta = pear.mean_delta;
    out.fix.secpear_max_delta = pear.max_delta;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateVector) throw;
  }
  return out;
}

std::vector<TrialOutcome> run_trials(const ScenarioConfig& config,
                                     std::size_t count,
                                     const std::vector<std::string>& attacks,
                                     unsigned max_threads) {
  std::vector<TrialOutcome> outcomes(count);
  const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(
      1, std::min<std::size_t>(std::max(1u, max_threads), count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      outcomes[k] = run_trial(config, k, attacks);
    }
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < count; k = next++) {
          outcomes[k] = run_trial(config, k, attacks);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outcomes;
}

}  // namespace pefl
