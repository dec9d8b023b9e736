#ifndef PEFL_FIX_VARIANTS_H_
#define PEFL_FIX_VARIANTS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "pefl/fixed_point.h"
#include "pefl/gradient_matrix.h"
#include "pefl/matrix.h"
#include "pefl/rng.h"
#include "pefl/scenario.h"
#include "pefl/wide_int.h"

// The obvious repair for the leakage is to give every user (SecMed) or
// every coordinate (SecPear) its own pad. These functions run the protocols
// with that repair and measure how far the outputs drift from the truth.

namespace pefl {

// How SP strips the pad from the median CP returns when pads differ per
// user.
enum class UnpadRule {
  // SP does not learn which user's value CP picked and subtracts the
  // rounded mean of its pads for that coordinate.
  kMeanPad,
  // CP additionally tells SP which user it picked and SP subtracts that
  // user's pad. The result is then always some user's true gradient.
  kSelectedUserPad,
};

struct SecMedFixResult {
  std::vector<Wide> unpadded;
  std::vector<std::int64_t> true_median;
  std::vector<Wide> delta;  // |unpadded - true_median|
  std::vector<std::size_t> selected_user;
  double wrong_fraction = 0.0;
};

// pads(x, i) is user x's pad at coordinate i.
SecMedFixResult fix_variant_secmed(const GradientMatrix& g,
                                   const Matrix<std::int64_t>& pads,
                                   UnpadRule rule = UnpadRule::kMeanPad);

struct SecPearFixResult {
  std::vector<double> rho_padded;
  std::vector<double> rho_true;
  std::vector<double> delta;  // |rho_padded - rho_true|
  double mean_delta = 0.0;
  double max_delta = 0.0;
};

// user_pads(x, i) multiplies g[x][i]; median_pads[i] multiplies the
// coordinate-wise median. Throws kDegenerateVector if any row or the median
// is constant.
SecPearFixResult fix_variant_secpear(const GradientMatrix& g,
                                     const Matrix<std::int64_t>& user_pads,
                                     const std::vector<std::int64_t>& median_pads);

// Uniform in [lo, hi] for every entry.
Matrix<std::int64_t> sample_pad_matrix(std::size_t rows, std::size_t cols,
                                       std::int64_t lo, std::int64_t hi,
                                       Rng& rng);

struct SecMedFixCheck {
  std::size_t coordinates = 0;
  std::size_t wrong = 0;
  std::size_t wrong_selected_pad = 0;
  Wide max_delta = 0;

  double failure_rate() const;
  double failure_rate_selected_pad() const;
};

// Monte Carlo over `coordinates` coordinates drawn from populations of the
// configured shape, with independent per-user pads of config.pad_bits bits.
SecMedFixCheck fixcheck_secmed(const ScenarioConfig& config,
                               std::size_t coordinates, std::uint64_t seed);

inline constexpr int kSecPearFixPadBits = 16;

struct SecPearFixCheck {
  std::size_t instances = 0;
  double mean_delta = 0.0;
  double min_delta = 0.0;
  double max_delta = 0.0;
};

// Monte Carlo over `instances` populations with per-coordinate pads uniform
// in [1, 2^pad_bits].
SecPearFixCheck fixcheck_secpear(const ScenarioConfig& config,
                                 std::size_t instances, std::uint64_t seed,
                                 int pad_bits = kSecPearFixPadBits);

}  // namespace pefl

#endif  // PEFL_FIX_VARIANTS_H_
