#ifndef PEFL_FIXED_POINT_H_
#define PEFL_FIXED_POINT_H_

#include <cstdint>
#include <span>
#include <vector>

namespace pefl {

inline constexpr int kDefaultScaleBits = 16;
inline constexpr int kDefaultValueBits = 40;

struct FixedPointFormat {
  int scale_bits = kDefaultScaleBits;
  int value_bits = kDefaultValueBits;

  // Largest |v| (exclusive) that encode_fixed accepts.
  double max_magnitude() const;
  // Largest |raw| (exclusive) that a gradient entry may hold.
  std::int64_t raw_limit() const;

  bool operator==(const FixedPointFormat&) const = default;
};

struct FixedPoint {
  std::int64_t raw = 0;
  int scale_bits = kDefaultScaleBits;

  bool operator==(const FixedPoint&) const = default;
};

// raw = round_half_to_even(v * 2^scale_bits). Throws Error(kRange) when
// |v| >= 2^(value_bits - scale_bits - 1) or v is not finite.
FixedPoint encode_fixed(double v, int scale_bits = kDefaultScaleBits,
                        int value_bits = kDefaultValueBits);

double decode_fixed(FixedPoint f);

// Vector of fixed-point values sharing one scale.
struct StatVector {
  std::vector<std::int64_t> raw;
  int scale_bits = kDefaultScaleBits;

  std::size_t size() const { return raw.size(); }
  FixedPoint at(std::size_t i) const { return {raw[i], scale_bits}; }
  std::vector<double> decoded() const;

  static StatVector from_raw(std::span<const std::int64_t> raw,
                             int scale_bits = kDefaultScaleBits);
  static StatVector encode(std::span<const double> values,
                           FixedPointFormat format = {});

  bool operator==(const StatVector&) const = default;
};

}  // namespace pefl

#endif  // PEFL_FIXED_POINT_H_
