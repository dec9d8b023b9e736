#ifndef PEFL_PAD_SET_H_
#define PEFL_PAD_SET_H_

#include <cstdint>
#include <vector>

#include "pefl/rng.h"

namespace pefl {

inline constexpr int kDefaultPadBits = 32;

// SP's masking material for one round. Only the protocol roles and the
// verification oracle ever see this; the attack code never does.
struct PadSet {
  std::vector<std::int64_t> r;  // additive, one per coordinate (SecMed)
  std::vector<std::int64_t> s;  // multiplicative, one per user (SecPear)
  std::int64_t s_y = 1;         // multiplicative, median vector (SecPear)
  std::vector<std::int64_t> t;  // additive, one per user (SecAgg)

  bool operator==(const PadSet&) const = default;
};

// r_i, t_x uniform in [0, 2^pad_bits); s_x, s_y uniform in [1, 2^pad_bits).
// Draw order is r, s, s_y, t.
PadSet sample_pads(std::size_t m, std::size_t n, int pad_bits, Rng& rng);

}  // namespace pefl

#endif  // PEFL_PAD_SET_H_
