#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pefl/cli.h"
#include "pefl/error.h"
#include "test_util.h"

namespace pefl::cli {
namespace {

using nlohmann::json;

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("pefl_cli_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(RunConfig, RoundTrip) {
  RunConfig c;
  c.scenario.m = 7;
  c.scenario.n = 5;
  c.scenario.honest_model = HonestModel::kLinearTask;
  c.scenario.poison = PoisonKind::kScale;
  c.scenario.poison_parameter = -2.75;
  c.scenario.poison_fraction = 0.1 + 0.2;  // not exactly representable
  c.scenario.backend = Backend::kPaillier;
  c.scenario.key_bits = 1024;
  c.scenario.weight_function = "relu";
  c.scenario.cp_registers = false;
  c.scenario.master_seed = 18446744073709551557ULL;
  c.trials = 3;
  c.attacks = {"combined", "secmed-diffs"};
  c.output = "out.json";
  EXPECT_EQ(parse_run_config(to_json(c)), c);
  EXPECT_EQ(parse_run_config(json::parse(to_json(c).dump())), c);
  EXPECT_EQ(parse_run_config(to_json(RunConfig{})), RunConfig{});
}

TEST(RunConfig, EmptyObjectGivesDefaults) {
  EXPECT_EQ(parse_run_config(json::object()), RunConfig{});
}

TEST(RunConfig, Rejections) {
  const auto bad = [](json j) {
    SCOPED_TRACE(j.dump());
    EXPECT_PEFL_ERROR(parse_run_config(j), ErrorCode::kConfigParse);
  };
  bad({{"trials", 0}});
  bad({{"trails", 3}});
  bad({{"m", -4}});
  bad({{"m", "ten"}});
  bad({{"m", 2}});
  bad({{"attacks", {"combined", "bogus"}}});
  bad({{"attacks", json::array()}});
  bad({{"backend", "rsa"}});
  bad({{"poison", "label_flip"}});
  bad({{"cp_registers", 1}});
  bad({{"schema_version", 2}});
  bad({{"poison_fraction", 0.6}});
  bad(json::array());
}

TEST(RunConfig, UnknownFieldIsNamed) {
  try {
    parse_run_config({{"seeed", 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("seeed"), std::string::npos);
  }
}

TEST(RunConfig, LoadErrors) {
  EXPECT_PEFL_ERROR(load_run_config("/nonexistent/config.json"), ErrorCode::kIo);
  const auto p = temp_path("malformed.json");
  std::ofstream(p) << "{ \"m\": ";
  EXPECT_PEFL_ERROR(load_run_config(p.string()), ErrorCode::kConfigParse);
  std::filesystem::remove(p);
}

TEST(WriteJson, IoError) {
  EXPECT_PEFL_ERROR(write_json(json::object(), "/nonexistent/dir/out.json"),
                    ErrorCode::kIo);
}

TEST(CmdSimulate, ReportShapeAndSummaryLines) {
  const auto out_path = temp_path("report.json");
  SimulateOptions opt;
  opt.seed = 42;
  opt.trials = 3;
  opt.out_path = out_path.string();
  opt.max_threads = 2;
  std::ostringstream out;
  const json report = cmd_simulate(opt, out);

  EXPECT_EQ(report["tool"], "pefl-sim");
  EXPECT_EQ(report["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(report["master_seed"], 42);
  EXPECT_EQ(report["config"]["trials"], 3);
  EXPECT_EQ(report["trials"].size(), 3u);
  EXPECT_TRUE(report.contains("generated_at"));
  EXPECT_EQ(report["summary"]["attacks"]["combined"]["mean_coverage"], 1.0);

  std::ifstream in(out_path);
  std::stringstream file;
  file << in.rdbuf();
  const std::string text = file.str();
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(json::parse(text), report);

  std::set<std::string> seen;
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) {
    ASSERT_EQ(line.rfind("attack=", 0), 0u) << line;
    seen.insert(line.substr(7, line.find(' ') - 7));
  }
  EXPECT_EQ(seen.size(), std::size(kAttackIds));
  EXPECT_NE(out.str().find("attack=combined trials=3 mean_coverage=1.000000"),
            std::string::npos);
  std::filesystem::remove(out_path);
}

TEST(CmdSimulate, PayloadIsDeterministic) {
  SimulateOptions opt;
  opt.seed = 7;
  opt.trials = 2;
  std::ostringstream sink;
  opt.max_threads = 1;
  const json a = cmd_simulate(opt, sink);
  opt.max_threads = 3;
  const json b = cmd_simulate(opt, sink);
  EXPECT_EQ(report_payload(a).dump(), report_payload(b).dump());
}

TEST(CmdSimulate, ConfigFileAndOverrides) {
  const auto cfg = temp_path("config.json");
  std::ofstream(cfg) << R"({"m": 5, "n": 4, "trials": 9, "attacks": ["cp-user"]})";
  SimulateOptions opt;
  opt.config_path = cfg.string();
  opt.trials = 2;
  std::ostringstream out;
  const json report = cmd_simulate(opt, out);
  EXPECT_EQ(report["config"]["m"], 5);
  EXPECT_EQ(report["trials"].size(), 2u);
  EXPECT_EQ(out.str().rfind("attack=cp-user trials=2 mean_coverage=1.000000", 0), 0u);
  opt.trials = 0;
  EXPECT_PEFL_ERROR(cmd_simulate(opt, out), ErrorCode::kConfigParse);
  std::filesystem::remove(cfg);
}

TEST(CmdSimulate, ThreadEnvVariable) {
  ::setenv(kMaxThreadsEnv, "zero", 1);
  SimulateOptions opt;
  opt.trials = 1;
  std::ostringstream out;
  EXPECT_PEFL_ERROR(cmd_simulate(opt, out), ErrorCode::kConfigParse);
  ::setenv(kMaxThreadsEnv, "2", 1);
  EXPECT_NO_THROW(cmd_simulate(opt, out));
  ::unsetenv(kMaxThreadsEnv);
}

TEST(CmdAttack, CpUserFullCoverage) {
  AttackOptions opt;
  opt.which = "cp-user";
  std::ostringstream out;
  const json report = cmd_attack(opt, out);
  EXPECT_NE(out.str().find("attack=cp-user m=10 n=32 backend=transparent coverage=1.000000"),
            std::string::npos)
      << out.str();
  EXPECT_EQ(report["trials"][0]["attacks"]["cp-user"]["coverage"], 1.0);
}

TEST(CmdAttack, ConstantRowNamedAsUnrecovered) {
  AttackOptions opt;
  opt.which = "combined";
  opt.constant_row = 3;
  std::ostringstream out;
  const json report = cmd_attack(opt, out);
  EXPECT_NE(out.str().find("unrecovered_rows=3\n"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("diag: row 0: anchor (0, 1)"), std::string::npos);
  EXPECT_LT(report["trials"][0]["attacks"]["combined"]["coverage"].get<double>(), 1.0);
  EXPECT_EQ(report["trials"][0]["attacks"]["combined"]["unrecovered_rows"],
            json::array({3}));
  opt.constant_row = 99;
  EXPECT_PEFL_ERROR(cmd_attack(opt, out), ErrorCode::kInvalidArgument);
}

TEST(CmdAttack, UnknownAttack) {
  AttackOptions opt;
  opt.which = "bogus";
  std::ostringstream out;
  EXPECT_PEFL_ERROR(cmd_attack(opt, out), ErrorCode::kUnknownAttack);
}

TEST(CmdAttack, PaillierBackend) {
  AttackOptions opt;
  opt.which = "combined";
  opt.m = 4;
  opt.n = 5;
  opt.backend = Backend::kPaillier;
  std::ostringstream out;
  cmd_attack(opt, out);
  EXPECT_NE(out.str().find("backend=paillier coverage=1.000000"), std::string::npos);
}

TEST(CmdFixcheck, Variants) {
  FixcheckOptions opt;
  opt.variant = "secmed-distinct";
  std::ostringstream out;
  const json med = cmd_fixcheck(opt, out);
  EXPECT_GE(med["result"]["failure_rate"].get<double>(), 0.99);
  EXPECT_EQ(med["result"]["coordinates"], 1000);
  opt.variant = "secpear-distinct";
  opt.samples = 20;
  const json pear = cmd_fixcheck(opt, out);
  EXPECT_GT(pear["result"]["mean_abs_delta_rho"].get<double>(), 0.1);
  EXPECT_NE(out.str().find("variant=secmed-distinct coordinates=1000"), std::string::npos);
  EXPECT_NE(out.str().find("variant=secpear-distinct instances=20"), std::string::npos);
  opt.variant = "trimmed-mean";
  EXPECT_PEFL_ERROR(cmd_fixcheck(opt, out), ErrorCode::kUnknownVariant);
}

TEST(ExitCodes, DistinctAndNonzero) {
  std::set<int> codes;
  for (int c = 0; c <= static_cast<int>(ErrorCode::kUnknownVariant); ++c) {
    const int code = exit_code_for(static_cast<ErrorCode>(c));
    EXPECT_GT(code, 1);
    EXPECT_LT(code, 64);
    codes.insert(code);
  }
  EXPECT_EQ(codes.size(), static_cast<std::size_t>(ErrorCode::kUnknownVariant) + 1);
}

}  // namespace
}  // namespace pefl::cli
