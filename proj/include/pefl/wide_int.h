#ifndef PEFL_WIDE_INT_H_
#define PEFL_WIDE_INT_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace pefl {

// Padded plaintexts outgrow 64 bits: a 40-bit gradient times a 32-bit
// multiplicative pad needs 72.
using Wide = __int128;

inline constexpr Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

// `/` and `%` on Wide truncate toward zero. Callers that need exact
// division test `a % b == 0` first.

std::string wide_to_string(Wide v);

// Parses an optionally signed decimal integer. Throws pefl::Error
// (kInvalidArgument) on malformed or overflowing input.
Wide wide_from_string(std::string_view text);

constexpr Wide wide_pow2(int bits) { return static_cast<Wide>(1) << bits; }

}  // namespace pefl

#endif  // PEFL_WIDE_INT_H_
