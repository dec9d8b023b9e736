#include "pefl/stats.h"

#include <gmpxx.h>

#include <cmath>
#include <string>

#include "gmp_util.h"

namespace pefl {
namespace {

void check_pair(std::size_t nx, std::size_t ny) {
  if (nx != ny) {
    throw Error(ErrorCode::kInvalidArgument,
                "length mismatch: " + std::to_string(nx) + " vs " +
                    std::to_string(ny));
  }
  if (nx < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two entries");
  }
}

}  // namespace

CovSigma cov_and_sigma(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size());
  // Single-pass co-moment update (Welford).
  double mean_x = 0.0, mean_y = 0.0;
  double m2x = 0.0, m2y = 0.0, cxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double count = static_cast<double>(k + 1);
    const double dx = x[k] - mean_x;
    const double dy = y[k] - mean_y;
    mean_x += dx / count;
    mean_y += dy / count;
    m2x += dx * (x[k] - mean_x);
    m2y += dy * (y[k] - mean_y);
    cxy += dx * (y[k] - mean_y);
  }
  const double n = static_cast<double>(x.size());
  return CovSigma{cxy / n, std::sqrt(m2x / n), std::sqrt(m2y / n)};
}

CovSigma cov_and_sigma(const StatVector& x, const StatVector& y) {
  const auto dx = x.decoded();
  const auto dy = y.decoded();
  return cov_and_sigma(std::span<const double>(dx), std::span<const double>(dy));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const CovSigma cs = cov_and_sigma(x, y);
  if (cs.sigma_x == 0.0 || cs.sigma_y == 0.0) {
    throw Error(ErrorCode::kDegenerateVector, "constant vector has sigma = 0");
  }
  return std::clamp(cs.cov / (cs.sigma_x * cs.sigma_y), -1.0, 1.0);
}

double pearson(const StatVector& x, const StatVector& y) {
  const auto dx = x.decoded();
  const auto dy = y.decoded();
  return pearson(std::span<const double>(dx), std::span<const double>(dy));
}

std::optional<double> pearson_exact(std::span<const Wide> x,
                                    std::span<const Wide> y) {
  check_pair(x.size(), y.size());
  mpz_class sx, sy, sxx, syy, sxy;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const mpz_class a = internal::to_mpz(x[k]);
    const mpz_class b = internal::to_mpz(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const mpz_class n = static_cast<unsigned long>(x.size());
  // n^2 Cov and n^2 Var, all exact.
  const mpz_class num = n * sxy - sx * sy;
  const mpz_class var_x = n * sxx - sx * sx;
  const mpz_class var_y = n * syy - sy * sy;
  if (sgn(var_x) == 0 || sgn(var_y) == 0) return std::nullopt;
  const double rho = num.get_d() / (std::sqrt(var_x.get_d()) *
                                    std::sqrt(var_y.get_d()));
  return std::clamp(rho, -1.0, 1.0);
}

}  // namespace pefl
