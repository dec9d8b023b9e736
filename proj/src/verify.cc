#include "pefl/verify.h"

#include "pefl/error.h"

namespace pefl {

Verdict verify_recovery(AttackReport& report, const GradientMatrix& truth) {
  if (report.recovered.rows() != truth.m() ||
      report.recovered.cols() != truth.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "report shape differs from ground truth");
  }
  Verdict verdict;
  report.exact = Matrix<EntryStatus>(truth.m(), truth.n());
  for (std::size_t x = 0; x < truth.m(); ++x) {
    for (std::size_t i = 0; i < truth.n(); ++i) {
      const auto& got = report.recovered(x, i);
      if (!got) continue;
      ++verdict.recovered;
      const bool exact = *got == static_cast<Wide>(truth(x, i));
      report.exact(x, i) = exact ? EntryStatus::kExact : EntryStatus::kInexact;
      ++(exact ? verdict.exact : verdict.inexact);
    }
  }
  report.finalize();
  verdict.coverage = report.coverage;
  return verdict;
}

}  // namespace pefl
