#ifndef PEFL_ATTACK_REPORT_H_
#define PEFL_ATTACK_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pefl/matrix.h"
#include "pefl/wide_int.h"

namespace pefl {

enum class AttackMethod {
  kCombined,
  kCpAsUser,
  kSingleKnown,
  kProbabilistic,
};

std::string_view attack_method_name(AttackMethod method);

enum class EntryStatus : std::uint8_t { kNotRecovered, kExact, kInexact };

struct RecoveredPads {
  std::vector<std::optional<Wide>> r;  // per coordinate
  std::vector<std::optional<Wide>> s;  // per user
  std::vector<std::optional<Wide>> t;  // per user
};

struct AttackReport {
  AttackMethod method = AttackMethod::kCombined;
  Matrix<std::optional<Wide>> recovered;
  RecoveredPads pads;
  double coverage = 0.0;
  // Rows with no recovered entry, in increasing order.
  std::vector<std::size_t> unrecovered_rows;
  std::vector<std::string> diagnostics;
  // Filled only by verify_recovery; empty until then.
  Matrix<EntryStatus> exact;

  std::size_t recovered_count() const;
  // Recomputes coverage and unrecovered_rows from `recovered`.
  void finalize();
};

}  // namespace pefl

#endif  // PEFL_ATTACK_REPORT_H_
