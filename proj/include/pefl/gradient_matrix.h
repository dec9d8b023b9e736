#ifndef PEFL_GRADIENT_MATRIX_H_
#define PEFL_GRADIENT_MATRIX_H_

#include <cstdint>
#include <vector>

#include "pefl/fixed_point.h"
#include "pefl/matrix.h"

namespace pefl {

// The secret: one fixed-point gradient vector per user (rows), one column per
// model coordinate.
struct GradientMatrix {
  Matrix<std::int64_t> values;
  int scale_bits = kDefaultScaleBits;

  std::size_t m() const { return values.rows(); }
  std::size_t n() const { return values.cols(); }
  std::int64_t operator()(std::size_t x, std::size_t i) const {
    return values(x, i);
  }
  std::int64_t& operator()(std::size_t x, std::size_t i) {
    return values(x, i);
  }

  StatVector row(std::size_t x) const {
    return StatVector::from_raw(values.row(x), scale_bits);
  }

  static GradientMatrix from_rows(
      const std::vector<std::vector<std::int64_t>>& rows,
      int scale_bits = kDefaultScaleBits);

  bool operator==(const GradientMatrix&) const = default;
};

}  // namespace pefl

#endif  // PEFL_GRADIENT_MATRIX_H_
