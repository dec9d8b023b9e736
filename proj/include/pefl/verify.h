#ifndef PEFL_VERIFY_H_
#define PEFL_VERIFY_H_

#include <cstddef>

#include "pefl/attack_report.h"
#include "pefl/gradient_matrix.h"

namespace pefl {

struct Verdict {
  double coverage = 0.0;
  std::size_t recovered = 0;
  std::size_t exact = 0;
  std::size_t inexact = 0;

  bool all_exact() const { return inexact == 0; }
};

// The only place where attack output meets ground truth. Marks each entry
// of report.exact and recomputes coverage. Exact means integer equality in
// the fixed-point domain. Throws kShapeMismatch.
Verdict verify_recovery(AttackReport& report, const GradientMatrix& truth);

}  // namespace pefl

#endif  // PEFL_VERIFY_H_
