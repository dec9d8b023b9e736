#ifndef PEFL_CLOUD_VIEWS_H_
#define PEFL_CLOUD_VIEWS_H_

#include <vector>

#include "pefl/matrix.h"
#include "pefl/wide_int.h"

namespace pefl {

// Everything CP decrypts during one round, verbatim. Row x is user x in all
// three matrices.
struct CloudViews {
  Matrix<Wide> secmed;              // g[x][i] + r[i]
  std::vector<Wide> medians_padded; // median_x(g[x][i] + r[i])
  Matrix<Wide> secpear;             // g[x][i] * s[x]
  std::vector<Wide> secpear_median; // g_y[i] * s_y
  Matrix<Wide> secagg;              // g[x][i] + t[x]

  std::size_t m() const { return secmed.rows(); }
  std::size_t n() const { return secmed.cols(); }

  bool operator==(const CloudViews&) const = default;
};

}  // namespace pefl

#endif  // PEFL_CLOUD_VIEWS_H_
