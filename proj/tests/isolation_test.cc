// The attack header must not make pads or ground truth reachable, either
// directly or through its own includes.
#include "pefl/attacks.h"

#ifdef PEFL_PAD_SET_H_
#error "attacks.h exposes PadSet"
#endif
#ifdef PEFL_GRADIENT_MATRIX_H_
#error "attacks.h exposes GradientMatrix"
#endif
#ifdef PEFL_PIPELINE_H_
#error "attacks.h exposes the pipeline"
#endif
#ifdef PEFL_VERIFY_H_
#error "attacks.h exposes verify_recovery"
#endif

#include <gtest/gtest.h>

#include "isolation_scan.h"

namespace pefl {
namespace {

TEST(AttackIsolation, HeaderClosureExcludesPadsAndTruth) {
  const auto findings = isolation::scan(PEFL_SOURCE_DIR);
  for (const auto& f : findings) ADD_FAILURE() << f;
  EXPECT_TRUE(findings.empty());
}

TEST(AttackIsolation, ScannerCatchesAForbiddenInclude) {
  EXPECT_FALSE(isolation::forbidden_tokens_in("#include \"pefl/pad_set.h\"").empty());
  EXPECT_FALSE(isolation::forbidden_tokens_in("const PadSet& p").empty());
  EXPECT_FALSE(isolation::forbidden_tokens_in("GradientMatrix g;").empty());
  EXPECT_TRUE(isolation::forbidden_tokens_in("Matrix<Wide> secmed;").empty());
}

}  // namespace
}  // namespace pefl
