#include "pefl/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "pefl/fix_variants.h"

namespace pefl::cli {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) {
  throw Error(ErrorCode::kConfigParse, msg);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

json opt_double(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Field readers for parse_run_config. Each consumes its key from `seen`.
class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {
    if (!j.is_object()) parse_fail("config must be a JSON object");
  }

  template <class T>
  void unsigned_field(const char* key, T& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) parse_fail(std::string(key) + " must be a non-negative integer");
    const auto raw = v.get<std::uint64_t>();
    if (raw > std::numeric_limits<T>::max()) parse_fail(std::string(key) + " out of range");
    out = static_cast<T>(raw);
  }

  void int_field(const char* key, int& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) parse_fail(std::string(key) + " must be an integer");
    const auto raw = v.get<std::int64_t>();
    if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max()) {
      parse_fail(std::string(key) + " out of range");
    }
    out = static_cast<int>(raw);
  }

  void double_field(const char* key, double& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) parse_fail(std::string(key) + " must be a number");
    out = v.get<double>();
  }

  void bool_field(const char* key, bool& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) parse_fail(std::string(key) + " must be a boolean");
    out = v.get<bool>();
  }

  void string_field(const char* key, std::string& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) parse_fail(std::string(key) + " must be a string");
    out = v.get<std::string>();
  }

  template <class E>
  void enum_field(const char* key, E& out, E (*parse)(std::string_view)) {
    std::string name;
    if (!take(key)) return;
    string_field_unchecked(key, name);
    try {
      out = parse(name);
    } catch (const Error& e) {
      parse_fail(std::string(key) + ": " + e.what());
    }
  }

  void string_list_field(const char* key, std::vector<std::string>& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) parse_fail(std::string(key) + " must be an array of strings");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_string()) parse_fail(std::string(key) + " must be an array of strings");
      out.push_back(e.get<std::string>());
    }
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) parse_fail("unknown field '" + it.key() + "'");
    }
  }

 private:
  bool take(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  void string_field_unchecked(const char* key, std::string& out) {
    const json& v = j_.at(key);
    if (!v.is_string()) parse_fail(std::string(key) + " must be a string");
    out = v.get<std::string>();
  }

  const json& j_;
  std::set<std::string> seen_;
};

void validate_run_config(const RunConfig& c) {
  if (c.trials < 1) parse_fail("trials must be >= 1");
  if (c.attacks.empty()) parse_fail("attacks must not be empty");
  for (const auto& id : c.attacks) {
    if (!is_attack_id(id)) parse_fail("unknown attack id '" + id + "'");
  }
  try {
    c.scenario.validate();
  } catch (const Error& e) {
    parse_fail(e.what());
  }
}

json verdict_json(const AttackOutcome& a) {
  json j;
  j["coverage"] = a.coverage;
  j["recovered"] = a.verdict.recovered;
  j["exact"] = a.verdict.exact;
  j["inexact"] = a.verdict.inexact;
  j["all_exact"] = a.verdict.all_exact();
  j["unrecovered_rows"] = a.unrecovered_rows;
  if (a.id == "probabilistic") j["constraints"] = a.constraints;
  return j;
}

json trial_json(const TrialOutcome& t) {
  json j;
  j["index"] = t.trial_index;
  j["seed"] = t.seed;
  std::vector<std::size_t> poisoned;
  for (std::size_t x = 0; x < t.population.poisoned.size(); ++x) {
    if (t.population.poisoned[x]) poisoned.push_back(x);
  }
  j["poisoned_users"] = poisoned;
  j["cp_row"] = t.population.cp_row ? json(*t.population.cp_row) : json(nullptr);
  json rho = json::array();
  for (const auto& r : t.round.rho) rho.push_back(opt_double(r));
  j["rho"] = rho;
  j["weights"] = t.round.weights;

  const DefenseMetrics& d = t.defense;
  j["defense"] = {
      {"honest_min_weight", d.honest_min_weight},
      {"honest_mean_weight", d.honest_mean_weight},
      {"poisoned_max_weight", d.poisoned_max_weight},
      {"poisoned_max_rho", opt_double(d.poisoned_max_rho)},
      {"poisoned_all_zero", d.poisoned_all_zero},
      {"aggregate_rho_with_base", opt_double(d.aggregate_rho_with_base)},
      {"all_weights_zero", d.all_weights_zero},
  };

  json attacks = json::object();
  for (const auto& a : t.attacks) attacks[a.id] = verdict_json(a);
  j["attacks"] = attacks;

  j["fix_variants"] = {
      {"secmed_wrong_fraction", t.fix.secmed_wrong_fraction},
      {"secmed_wrong_fraction_selected_pad", t.fix.secmed_wrong_fraction_selected_pad},
      {"secmed_max_delta", wide_to_string(t.fix.secmed_max_delta)},
      {"secpear_mean_delta", t.fix.secpear_mean_delta},
      {"secpear_max_delta", t.fix.secpear_max_delta},
  };
  return j;
}

struct Range {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  json to_json() const {
    if (count == 0) return json(nullptr);
    return {{"min", min}, {"max", max}, {"mean", mean()}};
  }
};

struct AttackSummary {
  Range coverage;
  std::size_t exact = 0;
  std::size_t inexact = 0;
};

std::map<std::string, AttackSummary> summarize_attacks(
    const std::vector<TrialOutcome>& trials) {
  std::map<std::string, AttackSummary> out;
  for (const auto& t : trials) {
    for (const auto& a : t.attacks) {
      AttackSummary& s = out[a.id];
      s.coverage.add(a.coverage);
      s.exact += a.verdict.exact;
      s.inexact += a.verdict.inexact;
    }
  }
  return out;
}

json summary_json(const std::vector<TrialOutcome>& trials) {
  json attacks = json::object();
  for (const auto& [id, s] : summarize_attacks(trials)) {
    attacks[id] = {
        {"trials", s.coverage.count},
        {"mean_coverage", s.coverage.mean()},
        {"min_coverage", s.coverage.min},
        {"max_coverage", s.coverage.max},
        {"exact_entries", s.exact},
        {"inexact_entries", s.inexact},
        {"all_exact", s.inexact == 0},
    };
  }

  Range wrong, wrong_sel, pear_mean, pear_max, agg_rho;
  Wide med_max = 0;
  std::size_t poisoned_zero = 0;
  for (const auto& t : trials) {
    wrong.add(t.fix.secmed_wrong_fraction);
    wrong_sel.add(t.fix.secmed_wrong_fraction_selected_pad);
    pear_mean.add(t.fix.secpear_mean_delta);
    pear_max.add(t.fix.secpear_max_delta);
    med_max = std::max(med_max, t.fix.secmed_max_delta);
    if (t.defense.poisoned_all_zero) ++poisoned_zero;
    if (t.defense.aggregate_rho_with_base) agg_rho.add(*t.defense.aggregate_rho_with_base);
  }
  json j;
  j["attacks"] = attacks;
  j["defense"] = {
      {"trials_poisoned_all_zero", poisoned_zero},
      {"aggregate_rho_with_base", agg_rho.to_json()},
  };
  j["fix_variants"] = {
      {"secmed_wrong_fraction", wrong.to_json()},
      {"secmed_wrong_fraction_selected_pad", wrong_sel.to_json()},
      {"secmed_max_delta", wide_to_string(med_max)},
      {"secpear_mean_delta", pear_mean.to_json()},
      {"secpear_max_delta", pear_max.to_json()},
  };
  return j;
}

json report_header(std::string_view command, std::uint64_t master_seed) {
  json j;
  j["tool"] = std::string(kToolName);
  j["tool_version"] = std::string(kToolVersion);
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = std::string(command);
  j["master_seed"] = master_seed;
  j["generated_at"] = utc_timestamp();
  return j;
}

unsigned resolve_threads(const std::optional<unsigned>& explicit_threads) {
  if (explicit_threads) return std::max(1u, *explicit_threads);
  if (const char* env = std::getenv(kMaxThreadsEnv); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0) {
      parse_fail(std::string(kMaxThreadsEnv) + " must be a positive integer");
    }
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  ScenarioConfig& s = c.scenario;
  Reader r(j);
  int schema = kConfigSchemaVersion;
  r.int_field("schema_version", schema);
  if (schema != kConfigSchemaVersion) {
    parse_fail("unsupported schema_version " + std::to_string(schema));
  }
  r.unsigned_field("m", s.m);
  r.unsigned_field("n", s.n);
  r.enum_field("honest_model", s.honest_model, &parse_honest_model);
  r.enum_field("poison", s.poison, &parse_poison_kind);
  r.double_field("poison_parameter", s.poison_parameter);
  r.double_field("poison_fraction", s.poison_fraction);
  r.double_field("honest_noise", s.honest_noise);
  r.unsigned_field("linear_samples", s.linear_samples);
  r.int_field("pad_bits", s.pad_bits);
  r.int_field("scale_bits", s.scale_bits);
  r.int_field("value_bits", s.value_bits);
  r.enum_field("backend", s.backend, &parse_backend);
  r.int_field("key_bits", s.key_bits);
  r.string_field("weight_function", s.weight_function);
  r.bool_field("cp_registers", s.cp_registers);
  r.unsigned_field("master_seed", s.master_seed);
  r.unsigned_field("trials", c.trials);
  r.string_list_field("attacks", c.attacks);
  r.string_field("output", c.output);
  r.reject_unknown();
  validate_run_config(c);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail("'" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  const ScenarioConfig& s = c.scenario;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["m"] = s.m;
  j["n"] = s.n;
  j["honest_model"] = std::string(honest_model_name(s.honest_model));
  j["poison"] = std::string(poison_kind_name(s.poison));
  j["poison_parameter"] = s.poison_parameter;
  j["poison_fraction"] = s.poison_fraction;
  j["honest_noise"] = s.honest_noise;
  j["linear_samples"] = s.linear_samples;
  j["pad_bits"] = s.pad_bits;
  j["scale_bits"] = s.scale_bits;
  j["value_bits"] = s.value_bits;
  j["backend"] = std::string(backend_name(s.backend));
  j["key_bits"] = s.key_bits;
  j["weight_function"] = s.weight_function;
  j["cp_registers"] = s.cp_registers;
  j["master_seed"] = s.master_seed;
  j["trials"] = c.trials;
  j["attacks"] = c.attacks;
  j["output"] = c.output;
  return j;
}

json build_report(const RunConfig& config, std::string_view command,
                  const std::vector<TrialOutcome>& trials) {
  json j = report_header(command, config.scenario.master_seed);
  j["config"] = to_json(config);
  json per_trial = json::array();
  for (const auto& t : trials) per_trial.push_back(trial_json(t));
  j["trials"] = per_trial;
  j["summary"] = summary_json(trials);
  return j;
}

json report_payload(json report) {
  report.erase("generated_at");
  return report;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

json cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  RunConfig config;
  if (options.config_path) config = load_run_config(*options.config_path);
  if (options.seed) config.scenario.master_seed = *options.seed;
  if (options.trials) config.trials = *options.trials;
  if (options.out_path) config.output = *options.out_path;
  validate_run_config(config);

  const unsigned threads = resolve_threads(options.max_threads);
  const auto trials =
      run_trials(config.scenario, config.trials, config.attacks, threads);
  json report = build_report(config, "simulate", trials);
  if (!config.output.empty()) write_json(report, config.output);

  for (const auto& [id, s] : summarize_attacks(trials)) {
    out << "attack=" << id << " trials=" << s.coverage.count
        << " mean_coverage=" << fmt_double(s.coverage.mean())
        << " min_coverage=" << fmt_double(s.coverage.min)
        << " exact=" << s.exact << " inexact=" << s.inexact
        << " all_exact=" << fmt_bool(s.inexact == 0) << '\n';
  }
  return report;
}

json cmd_attack(const AttackOptions& options, std::ostream& out) {
  if (!is_attack_id(options.which)) {
    throw Error(ErrorCode::kUnknownAttack, "unknown attack '" + options.which + "'");
  }
  RunConfig config;
  config.trials = 1;
  config.attacks = {options.which};
  ScenarioConfig& s = config.scenario;
  s.m = options.m;
  s.n = options.n;
  s.backend = options.backend;
  s.key_bits = options.key_bits;
  s.master_seed = options.seed;
  if (options.out_path) config.output = *options.out_path;
  s.validate();

  const std::uint64_t seed = trial_seed(s, 0);
  Population pop = gen_population(s, seed);
  if (options.constant_row) {
    const std::size_t row = *options.constant_row;
    if (row >= pop.gradients.m()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "constant row " + std::to_string(row) + " out of range");
    }
    auto values = pop.gradients.values.row(row);
    std::fill(values.begin(), values.end(), values[0]);
    out << "crafted: row " << row << " set to constant " << values[0] << '\n';
  }
  const TrialOutcome outcome = run_trial_on(s, 0, seed, std::move(pop), config.attacks);

  json report = build_report(config, "attack", {outcome});
  if (options.constant_row) report["crafted_constant_row"] = *options.constant_row;
  if (!config.output.empty()) write_json(report, config.output);

  for (const auto& a : outcome.attacks) {
    for (const auto& line : a.diagnostics) out << "diag: " << line << '\n';
    std::string rows;
    for (const auto r : a.unrecovered_rows) {
      rows += (rows.empty() ? "" : ",") + std::to_string(r);
    }
    out << "attack=" << a.id << " m=" << s.m << " n=" << s.n
        << " backend=" << backend_name(s.backend)
        << " coverage=" << fmt_double(a.coverage)
        << " recovered=" << a.verdict.recovered << " exact=" << a.verdict.exact
        << " inexact=" << a.verdict.inexact
        << " unrecovered_rows=" << (rows.empty() ? "none" : rows) << '\n';
  }
  return report;
}

json cmd_fixcheck(const FixcheckOptions& options, std::ostream& out) {
  ScenarioConfig s;
  s.master_seed = options.seed;
  json j = report_header("fixcheck", options.seed);
  j["variant"] = options.variant;
  if (options.variant == "secmed-distinct") {
    const std::size_t samples = options.samples.value_or(1000);
    const SecMedFixCheck r = fixcheck_secmed(s, samples, options.seed);
    j["result"] = {
        {"coordinates", r.coordinates},
        {"pad_bits", s.pad_bits},
        {"wrong", r.wrong},
        {"failure_rate", r.failure_rate()},
        {"wrong_selected_pad", r.wrong_selected_pad},
        {"failure_rate_selected_pad", r.failure_rate_selected_pad()},
        {"max_delta", wide_to_string(r.max_delta)},
    };
    out << "variant=secmed-distinct coordinates=" << r.coordinates
        << " pad_bits=" << s.pad_bits << " wrong=" << r.wrong
        << " failure_rate=" << fmt_double(r.failure_rate())
        << " failure_rate_selected_pad=" << fmt_double(r.failure_rate_selected_pad())
        << " max_delta=" << wide_to_string(r.max_delta) << '\n';
  } else if (options.variant == "secpear-distinct") {
    const std::size_t samples = options.samples.value_or(100);
    const SecPearFixCheck r = fixcheck_secpear(s, samples, options.seed);
    j["result"] = {
        {"instances", r.instances},
        {"pad_bits", kSecPearFixPadBits},
        {"mean_abs_delta_rho", r.mean_delta},
        {"min_abs_delta_rho", r.min_delta},
        {"max_abs_delta_rho", r.max_delta},
    };
    out << "variant=secpear-distinct instances=" << r.instances
        << " pad_bits=" << kSecPearFixPadBits
        << " mean_abs_delta_rho=" << fmt_double(r.mean_delta)
        << " min_abs_delta_rho=" << fmt_double(r.min_delta)
        << " max_abs_delta_rho=" << fmt_double(r.max_delta) << '\n';
  } else {
    throw Error(ErrorCode::kUnknownVariant,
                "unknown variant '" + options.variant +
                    "' (expected secmed-distinct or secpear-distinct)");
  }
  if (options.out_path) write_json(j, *options.out_path);
  return j;
}

int exit_code_for(ErrorCode code) { return 2 + static_cast<int>(code); }

}  // namespace pefl::cli
