#include "pefl/fixed_point.h"

#include <cmath>
#include <string>

#include "pefl/error.h"

namespace pefl {

double FixedPointFormat::max_magnitude() const {
  return std::ldexp(1.0, value_bits - scale_bits - 1);
}

std::int64_t FixedPointFormat::raw_limit() const {
  return std::int64_t{1} << (value_bits - 1);
}

FixedPoint encode_fixed(double v, int scale_bits, int value_bits) {
  if (scale_bits < 0 || value_bits > 62 || value_bits <= scale_bits + 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad fixed-point format");
  }
  const FixedPointFormat format{scale_bits, value_bits};
  if (!std::isfinite(v) || std::fabs(v) >= format.max_magnitude()) {
    throw Error(ErrorCode::kRange,
                std::to_string(v) + " outside fixed-point dynamic range");
  }
  // Scaling by a power of two is exact; nearbyint rounds half to even under
  // the default FE_TONEAREST mode.
  const double scaled = std::nearbyint(std::ldexp(v, scale_bits));
  const auto raw = static_cast<std::int64_t>(scaled);
  if (raw >= format.raw_limit() || raw <= -format.raw_limit()) {
    throw Error(ErrorCode::kRange,
                std::to_string(v) + " rounds outside fixed-point range");
  }
  return FixedPoint{raw, scale_bits};
}

double decode_fixed(FixedPoint f) {
  return std::ldexp(static_cast<double>(f.raw), -f.scale_bits);
}

std::vector<double> StatVector::decoded() const {
  std::vector<double> out;
  out.reserve(raw.size());
  for (std::int64_t r : raw) out.push_back(decode_fixed({r, scale_bits}));
  return out;
}

StatVector StatVector::from_raw(std::span<const std::int64_t> raw,
                                int scale_bits) {
  return StatVector{std::vector<std::int64_t>(raw.begin(), raw.end()),
                    scale_bits};
}

StatVector StatVector::encode(std::span<const double> values,
                              FixedPointFormat format) {
  StatVector out;
  out.scale_bits = format.scale_bits;
  out.raw.reserve(values.size());
  for (double v : values) {
    out.raw.push_back(encode_fixed(v, format.scale_bits, format.value_bits).raw);
  }
  return out;
}

}  // namespace pefl
