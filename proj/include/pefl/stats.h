#ifndef PEFL_STATS_H_
#define PEFL_STATS_H_

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "pefl/error.h"
#include "pefl/fixed_point.h"
#include "pefl/wide_int.h"

namespace pefl {

// Lower median: for even sizes the smaller of the two middle order
// statistics, so the result is always an element of `values`.
template <typename Int>
Int median_int(std::span<const Int> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "median of nothing");
  std::vector<Int> sorted(values.begin(), values.end());
  auto mid = sorted.begin() + (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), mid, sorted.end());
  return *mid;
}

template <typename Int>
Int median_int(const std::vector<Int>& values) {
  return median_int(std::span<const Int>(values));
}

// Index of the element median_int would return. Ties resolve to the lowest
// index holding the median value.
template <typename Int>
std::size_t median_index(std::span<const Int> values) {
  const Int m = median_int(values);
  return static_cast<std::size_t>(
      std::find(values.begin(), values.end(), m) - values.begin());
}

// Population (1/n) moments.
struct CovSigma {
  double cov = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

CovSigma cov_and_sigma(std::span<const double> x, std::span<const double> y);
CovSigma cov_and_sigma(const StatVector& x, const StatVector& y);

// Cov(x,y) / (sigma(x) sigma(y)) on decoded values. Throws
// kDegenerateVector if either vector is constant and kInvalidArgument on a
// length mismatch or length < 2.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const StatVector& x, const StatVector& y);

// Pearson coefficient of two integer vectors using exact big-integer sums,
// rounded to double only in the final ratio. Multiplying either input by a
// positive constant changes the result by at most a few ulps. Returns
// nullopt for a constant vector.
std::optional<double> pearson_exact(std::span<const Wide> x,
                                    std::span<const Wide> y);

}  // namespace pefl

#endif  // PEFL_STATS_H_
