#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pefl/error.h"
#include "pefl/fixed_point.h"
#include "pefl/stats.h"
#include "pefl/wide_int.h"
#include "test_util.h"

namespace pefl {
namespace {

// Two-pass population moments, the textbook definition.
CovSigma two_pass(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return {sxy / n, std::sqrt(sxx / n), std::sqrt(syy / n)};
}

std::vector<double> random_reals(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& e : v) e = d(rng);
  return v;
}

TEST(EncodeFixed, Examples) {
  EXPECT_EQ(encode_fixed(1.5, 16).raw, 98304);
  EXPECT_EQ(encode_fixed(0.0, 16).raw, 0);
  EXPECT_EQ(encode_fixed(-0.25, 16).raw, -16384);
  EXPECT_EQ(encode_fixed(1.5, 16).scale_bits, 16);
}

TEST(EncodeFixed, RoundsHalfToEven) {
  const double ulp = std::ldexp(1.0, -16);
  EXPECT_EQ(encode_fixed(0.5 * ulp).raw, 0);
  EXPECT_EQ(encode_fixed(1.5 * ulp).raw, 2);
  EXPECT_EQ(encode_fixed(2.5 * ulp).raw, 2);
  EXPECT_EQ(encode_fixed(-0.5 * ulp).raw, 0);
  EXPECT_EQ(encode_fixed(-1.5 * ulp).raw, -2);
}

TEST(EncodeFixed, RejectsOutOfRange) {
  // value_bits 40, scale_bits 16: |v| < 2^23.
  const double limit = std::ldexp(1.0, 23);
  EXPECT_NO_THROW(encode_fixed(limit - 1.0));
  EXPECT_PEFL_ERROR(encode_fixed(limit), ErrorCode::kRange);
  EXPECT_PEFL_ERROR(encode_fixed(-limit), ErrorCode::kRange);
  EXPECT_PEFL_ERROR(encode_fixed(std::numeric_limits<double>::quiet_NaN()),
                    ErrorCode::kRange);
  EXPECT_PEFL_ERROR(encode_fixed(std::numeric_limits<double>::infinity()),
                    ErrorCode::kRange);
}

TEST(EncodeFixed, RawStaysBelowValueBits) {
  // The largest grid point is accepted; anything rounding onto 2^39 is not.
  const std::int64_t top = (std::int64_t{1} << 39) - 1;
  EXPECT_EQ(encode_fixed(std::ldexp(static_cast<double>(top), -16)).raw, top);
  EXPECT_EQ(encode_fixed(-std::ldexp(static_cast<double>(top), -16)).raw, -top);
  const double rounds_up = std::nextafter(std::ldexp(1.0, 23), 0.0);
  EXPECT_PEFL_ERROR(encode_fixed(rounds_up), ErrorCode::kRange);
}

TEST(DecodeFixed, Examples) {
  EXPECT_EQ(decode_fixed({98304, 16}), 1.5);
  EXPECT_EQ(decode_fixed({-16384, 16}), -0.25);
  EXPECT_EQ(decode_fixed({1, 16}), std::ldexp(1.0, -16));
}

TEST(FixedPointProperty, RoundTripExactOnGrid) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> raw(-(std::int64_t{1} << 38),
                                                  std::int64_t{1} << 38);
  for (int k = 0; k < 10000; ++k) {
    const std::int64_t r = raw(rng);
    EXPECT_EQ(encode_fixed(decode_fixed({r, 16})).raw, r);
  }
}

TEST(FixedPointProperty, RoundTripWithinHalfUlp) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  const double half_ulp = std::ldexp(1.0, -17);
  for (int k = 0; k < 10000; ++k) {
    const double v = d(rng);
    EXPECT_LE(std::abs(decode_fixed(encode_fixed(v)) - v), half_ulp);
  }
}

TEST(StatVector, EncodeAndDecode) {
  const std::vector<double> v{1.5, -0.25, 0.0};
  const StatVector s = StatVector::encode(v);
  EXPECT_EQ(s.raw, (std::vector<std::int64_t>{98304, -16384, 0}));
  EXPECT_EQ(s.decoded(), v);
  EXPECT_EQ(s.at(1), (FixedPoint{-16384, 16}));
}

TEST(MedianInt, Examples) {
  EXPECT_EQ(median_int(std::vector<std::int64_t>{3, 1, 2}), 2);
  EXPECT_EQ(median_int(std::vector<std::int64_t>{5}), 5);
  EXPECT_EQ(median_int(std::vector<std::int64_t>{1, 2, 3, 4}), 2);
}

TEST(MedianInt, EmptyInput) {
  EXPECT_PEFL_ERROR(median_int(std::vector<std::int64_t>{}),
                    ErrorCode::kEmptyInput);
}

TEST(MedianInt, IndexPointsAtFirstOccurrence) {
  const std::vector<std::int64_t> v{9, 4, 4, 1};
  EXPECT_EQ(median_index(std::span<const std::int64_t>(v)), 1u);
}

TEST(MedianIntProperty, LowerMedianAgainstSortOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_int_distribution<std::int64_t> val(-50, 50);
  for (int k = 0; k < 2000; ++k) {
    std::vector<std::int64_t> v(len(rng));
    for (auto& e : v) e = val(rng);
    const std::int64_t med = median_int(v);
    EXPECT_EQ(med, testing::sorted_lower_median(v));
    EXPECT_NE(std::find(v.begin(), v.end(), med), v.end());
    const auto le = std::count_if(v.begin(), v.end(), [&](auto e) { return e <= med; });
    const auto ge = std::count_if(v.begin(), v.end(), [&](auto e) { return e >= med; });
    const auto half = static_cast<long>((v.size() + 1) / 2);
    EXPECT_GE(le, half);
    if (v.size() % 2 == 1) EXPECT_GE(ge, half);
  }
}

TEST(MedianIntProperty, ShiftEquivariance) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_int_distribution<std::int64_t> val(-(1LL << 39), 1LL << 39);
  for (int k = 0; k < 2000; ++k) {
    std::vector<Wide> v(len(rng));
    for (auto& e : v) e = val(rng);
    const Wide c = static_cast<Wide>(val(rng)) << 20;
    std::vector<Wide> shifted(v);
    for (auto& e : shifted) e += c;
    EXPECT_TRUE(median_int(shifted) == median_int(v) + c);
  }
}

TEST(CovAndSigma, Examples) {
  const std::vector<double> x{0, 2};
  const CovSigma a = cov_and_sigma(x, x);
  EXPECT_DOUBLE_EQ(a.cov, 1.0);
  EXPECT_DOUBLE_EQ(a.sigma_x, 1.0);
  EXPECT_DOUBLE_EQ(a.sigma_y, 1.0);
  const std::vector<double> x3{0, 6};
  EXPECT_DOUBLE_EQ(cov_and_sigma(x3, x).sigma_x, 3.0);
}

TEST(CovAndSigma, MatchesTwoPassOracle) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> len(2, 64);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = len(rng);
    const auto x = random_reals(n, rng);
    const auto y = random_reals(n, rng);
    const CovSigma got = cov_and_sigma(x, y);
    const CovSigma want = two_pass(x, y);
    EXPECT_NEAR(got.cov, want.cov, 1e-9);
    EXPECT_NEAR(got.sigma_x, want.sigma_x, 1e-9);
    EXPECT_NEAR(got.sigma_y, want.sigma_y, 1e-9);
  }
}

TEST(CovAndSigma, ScalesBilinearly) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 200; ++k) {
    auto x = random_reals(16, rng);
    auto y = random_reals(16, rng);
    const double c = -2.5, d = 4.0;
    std::vector<double> cx(x), dy(y);
    for (auto& e : cx) e *= c;
    for (auto& e : dy) e *= d;
    const CovSigma base = cov_and_sigma(x, y);
    const CovSigma scaled = cov_and_sigma(cx, dy);
    EXPECT_NEAR(scaled.cov, c * d * base.cov, 1e-9);
    EXPECT_NEAR(scaled.sigma_x, std::abs(c) * base.sigma_x, 1e-9);
    EXPECT_NEAR(scaled.sigma_y, d * base.sigma_y, 1e-9);
  }
}

TEST(CovAndSigma, StatVectorOverloadUsesDecodedValues) {
  const StatVector x = StatVector::encode(std::vector<double>{0.0, 2.0});
  const CovSigma cs = cov_and_sigma(x, x);
  EXPECT_DOUBLE_EQ(cs.cov, 1.0);
}

TEST(Pearson, Examples) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{3, 2, 1};
  EXPECT_DOUBLE_EQ(pearson(x, x), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, y), -1.0);
}

TEST(Pearson, Errors) {
  const std::vector<double> c{4, 4, 4};
  const std::vector<double> x{1, 2, 3};
  EXPECT_PEFL_ERROR(pearson(c, x), ErrorCode::kDegenerateVector);
  EXPECT_PEFL_ERROR(pearson(x, c), ErrorCode::kDegenerateVector);
  const std::vector<double> one{1};
  EXPECT_PEFL_ERROR(pearson(one, one), ErrorCode::kInvalidArgument);
  const std::vector<double> two{1, 2};
  EXPECT_PEFL_ERROR(pearson(x, two), ErrorCode::kInvalidArgument);
}

TEST(PearsonProperty, AffineAndScaleInvariance) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> coef(0.1, 100.0);
  std::bernoulli_distribution flip(0.5);
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_reals(32, rng);
    const auto y = random_reals(32, rng);
    const double base = pearson(x, y);
    EXPECT_GE(base, -1.0);
    EXPECT_LE(base, 1.0);

    const double a = coef(rng), b = coef(rng);
    std::vector<double> ax(x);
    for (auto& e : ax) e = a * e + b;
    EXPECT_NEAR(pearson(ax, y), base, 1e-9);

    const double c = flip(rng) ? -coef(rng) : coef(rng);
    const double d = flip(rng) ? -coef(rng) : coef(rng);
    std::vector<double> cx(x), dy(y);
    for (auto& e : cx) e *= c;
    for (auto& e : dy) e *= d;
    EXPECT_NEAR(pearson(cx, dy), (c * d > 0 ? 1 : -1) * base, 1e-9);
  }
}

TEST(PearsonExact, AgreesWithFloatingPearson) {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<std::int64_t> val(-(1LL << 39), 1LL << 39);
  for (int k = 0; k < 500; ++k) {
    std::vector<Wide> x(20), y(20);
    std::vector<double> xd(20), yd(20);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto a = val(rng), b = val(rng);
      x[i] = a;
      y[i] = b;
      xd[i] = static_cast<double>(a);
      yd[i] = static_cast<double>(b);
    }
    const auto exact = pearson_exact(x, y);
    ASSERT_TRUE(exact.has_value());
    EXPECT_NEAR(*exact, pearson(xd, yd), 1e-12);
  }
}

TEST(PearsonExact, ConstantIsUndefined) {
  const std::vector<Wide> c{7, 7, 7};
  const std::vector<Wide> x{1, 2, 3};
  EXPECT_FALSE(pearson_exact(c, x).has_value());
  EXPECT_FALSE(pearson_exact(x, c).has_value());
}

TEST(PearsonExact, HugePaddedValuesKeepPrecision) {
  // Values near 2^72 are not exactly representable in double.
  const Wide s = (static_cast<Wide>(1) << 32) - 5;
  const std::vector<Wide> g{(1LL << 39) - 1, -(1LL << 39) + 3, 12345, -777};
  const std::vector<Wide> h{1, 2, 3, 5};
  std::vector<Wide> gs(g);
  for (auto& e : gs) e *= s;
  EXPECT_NEAR(*pearson_exact(gs, h), *pearson_exact(g, h), 1e-15);
}

TEST(WideInt, StringRoundTrip) {
  const Wide big = (static_cast<Wide>(1) << 100) + 12345;
  for (const Wide v : {Wide{0}, Wide{-1}, Wide{42}, big, -big}) {
    EXPECT_TRUE(wide_from_string(wide_to_string(v)) == v);
  }
  EXPECT_EQ(wide_to_string(-big), "-1267650600228229401496703217721");
  EXPECT_PEFL_ERROR(wide_from_string("12x"), ErrorCode::kInvalidArgument);
  EXPECT_PEFL_ERROR(wide_from_string(""), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace pefl
