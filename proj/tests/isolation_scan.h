#ifndef PEFL_TESTS_ISOLATION_SCAN_H_
#define PEFL_TESTS_ISOLATION_SCAN_H_

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Source-level check that the attack translation unit, together with every
// project header it pulls in, never names the pad set, the gradient matrix,
// the pipeline or the verifier.
namespace pefl::isolation {

inline const std::vector<std::string>& forbidden_tokens() {
  static const std::vector<std::string> tokens{
      "PadSet",   "GradientMatrix", "pad_set.h",    "gradient_matrix.h",
      "pipeline.h", "verify.h",     "scenario.h",   "fix_variants.h",
      "RoundResult", "run_round",   "verify_recovery", "sample_pads"};
  return tokens;
}

inline std::vector<std::string> forbidden_tokens_in(const std::string& text) {
  std::vector<std::string> hits;
  for (const auto& t : forbidden_tokens()) {
    if (text.find(t) != std::string::npos) hits.push_back(t);
  }
  return hits;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Comments may mention the forbidden names; code may not.
inline std::string strip_comments(const std::string& text) {
  static const std::regex line_comment("//[^\n]*");
  static const std::regex block_comment("/\\*[\\s\\S]*?\\*/");
  return std::regex_replace(std::regex_replace(text, block_comment, ""),
                            line_comment, "");
}

// Returns one message per violation; empty means isolated.
inline std::vector<std::string> scan(const std::filesystem::path& root) {
  std::vector<std::string> findings;
  const std::regex include_re("#include \"(pefl/[a-z_]+\\.h)\"");
  std::vector<std::filesystem::path> work{root / "src" / "attacks.cc",
                                          root / "include" / "pefl" / "attacks.h"};
  std::set<std::filesystem::path> seen;
  while (!work.empty()) {
    const auto path = work.back();
    work.pop_back();
    if (!seen.insert(path).second) continue;
    if (!std::filesystem::exists(path)) {
      findings.push_back("missing " + path.string());
      continue;
    }
    const std::string code = strip_comments(read_file(path));
    for (const auto& hit : forbidden_tokens_in(code)) {
      findings.push_back(path.filename().string() + " names " + hit);
    }
    for (std::sregex_iterator it(code.begin(), code.end(), include_re), end;
         it != end; ++it) {
      work.push_back(root / "include" / (*it)[1].str());
    }
  }
  if (seen.size() < 3) findings.push_back("scan reached too few files");
  return findings;
}

}  // namespace pefl::isolation

#endif  // PEFL_TESTS_ISOLATION_SCAN_H_
