#include "pefl/wide_int.h"

#include <algorithm>

#include "pefl/error.h"

namespace pefl {

std::string wide_to_string(Wide v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  // Work on the magnitude as unsigned so INT128_MIN does not overflow.
  unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(v)
                                   : static_cast<unsigned __int128>(v);
  std::string out;
  while (mag != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (negative) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

Wide wide_from_string(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "not an integer: '" + std::string(text) + "'");
  }
  constexpr unsigned __int128 kMax =
      static_cast<unsigned __int128>(1) << 127;  // |INT128_MIN|
  unsigned __int128 mag = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kInvalidArgument,
                  "not an integer: '" + std::string(text) + "'");
    }
    mag = mag * 10 + static_cast<unsigned>(c - '0');
    if (mag > kMax) {
      throw Error(ErrorCode::kInvalidArgument,
                  "integer overflows 128 bits: '" + std::string(text) + "'");
    }
  }
  if (!negative && mag == kMax) {
    throw Error(ErrorCode::kInvalidArgument,
                "integer overflows 128 bits: '" + std::string(text) + "'");
  }
  return negative ? static_cast<Wide>(-mag) : static_cast<Wide>(mag);
}

}  // namespace pefl
