#ifndef PEFL_ATTACKS_H_
#define PEFL_ATTACKS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "pefl/attack_report.h"
#include "pefl/cloud_views.h"
#include "pefl/matrix.h"
#include "pefl/side_information.h"
#include "pefl/wide_int.h"

// CP-side attacks. Everything here is a function of the matrices CP
// decrypted plus declared side information; pads and ground truth are not
// reachable from this header.

namespace pefl {

struct PadPairSolution {
  Wide g_i = 0;
  Wide g_j = 0;
  Wide s = 0;
  Wide t = 0;

  bool operator==(const PadPairSolution&) const = default;
};

// Inverts one user's entries at coordinates i, j seen in both SecPear
// (a1 = g_i s, a2 = g_j s) and SecAgg (b1 = g_i + t, b2 = g_j + t).
// delta = b2 - b1 = g_j - g_i, so a2 - a1 = delta * s exposes s.
// Throws kZeroDelta when b1 == b2 and kInconsistentViews when a division is
// not exact or s <= 0.
PadPairSolution solve_pad_pair(Wide a1, Wide a2, Wide b1, Wide b2);

// Full recovery from SecPear and SecAgg. Per row, anchors on the first pair
// (i, j > i) with b_j != b_i, recovers s_x and t_x, unpads the row via s_x
// and cross-checks every entry against SecAgg. Constant rows stay
// unrecovered.
AttackReport attack_combined(const Matrix<Wide>& secpear,
                             const Matrix<Wide>& secagg);
AttackReport attack_combined(const CloudViews& views);

struct ColumnDifference {
  std::size_t x = 0;
  std::size_t z = 0;
  Wide diff = 0;  // g[x][i] - g[z][i]

  bool operator==(const ColumnDifference&) const = default;
};

// For each coordinate i, every pair x < z with its exact gradient
// difference; the common pad cancels.
std::vector<std::vector<ColumnDifference>> attack_secmed_diffs(
    const Matrix<Wide>& secmed);

// CP registered as a user; its own row reveals every r_i. Throws
// kRowMismatch if the side information is not an OwnRow consistent with the
// view (wrong length, row out of range, or recovered values outside the
// value_bits range).
AttackReport attack_cp_as_user(const Matrix<Wide>& secmed,
                               const SideInformation& own_row,
                               int value_bits = 40);

// One known entry g[x][i] != 0 reveals r_i (column i via SecMed) and s_x
// (row x via SecPear). Every newly known nonzero entry then reveals its
// row pad, and every newly known entry its column pad, until nothing
// changes. Throws kZeroAnchor for a zero anchor and kInvalidArgument if the
// side information is not a SingleEntry inside the views.
AttackReport attack_single_known(const Matrix<Wide>& secmed,
                                 const Matrix<Wide>& secpear,
                                 const SideInformation& entry);

struct EqualityConstraint {
  std::size_t x = 0;
  std::size_t z = 0;
  std::size_t i = 0;
  // s_x / s_z = ratio_num / ratio_den; absent when the shared value is 0.
  std::optional<Wide> ratio_num;
  std::optional<Wide> ratio_den;
};

struct NearCollision {
  std::size_t x = 0;
  std::size_t z = 0;
  std::size_t i = 0;
  Wide distance = 0;
};

struct ProbabilisticOptions {
  // 0 disables near-collision scoring. Near collisions are reported but
  // never used for recovery.
  Wide near_tolerance = 0;
};

struct ProbabilisticResult {
  AttackReport report;
  std::vector<EqualityConstraint> constraints;
  std::vector<NearCollision> near_collisions;
};

// Equal SecMed entries within a column mean equal gradients, which pins the
// ratio of the two users' SecPear pads. With a SingleEntry anchor, row
// recovery propagates along those equalities.
ProbabilisticResult attack_probabilistic(const Matrix<Wide>& secmed,
                                         const Matrix<Wide>& secpear,
                                         const SideInformation& anchor = {},
                                         const ProbabilisticOptions& options = {});

}  // namespace pefl

#endif  // PEFL_ATTACKS_H_
