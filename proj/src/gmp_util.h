#ifndef PEFL_SRC_GMP_UTIL_H_
#define PEFL_SRC_GMP_UTIL_H_

#include <gmpxx.h>

#include <cstdint>

#include "pefl/wide_int.h"

namespace pefl::internal {

inline mpz_class to_mpz(Wide v) {
  const bool negative = v < 0;
  unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(v)
                                   : static_cast<unsigned __int128>(v);
  const std::uint64_t words[2] = {static_cast<std::uint64_t>(mag),
                                  static_cast<std::uint64_t>(mag >> 64)};
  mpz_class out;
  mpz_import(out.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
  if (negative) out = -out;
  return out;
}

// Caller guarantees |v| < 2^127.
inline Wide from_mpz(const mpz_class& v) {
  std::uint64_t words[2] = {0, 0};
  std::size_t count = 0;
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
  const unsigned __int128 mag =
      (static_cast<unsigned __int128>(words[1]) << 64) | words[0];
  return sgn(v) < 0 ? -static_cast<Wide>(mag) : static_cast<Wide>(mag);
}

inline bool fits_wide(const mpz_class& v) {
  return mpz_sizeinbase(v.get_mpz_t(), 2) <= 126;
}

}  // namespace pefl::internal

#endif  // PEFL_SRC_GMP_UTIL_H_
