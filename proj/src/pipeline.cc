#include "pefl/pipeline.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pefl/error.h"
#include "pefl/stats.h"

namespace pefl {
namespace {

enum Stream : std::uint64_t {
  kKeyStream = 1,
  kPadStream = 2,
  kUserStream = 3,
  kCloudStream = 4,
};

std::int64_t quantize_weight(double w, int weight_scale_bits) {
  if (!std::isfinite(w) || w < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "weight must be finite and non-negative");
  }
  return std::llround(std::ldexp(w, weight_scale_bits));
}

}  // namespace

GradientMatrix GradientMatrix::from_rows(
    const std::vector<std::vector<std::int64_t>>& rows, int scale_bits) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  GradientMatrix g{Matrix<std::int64_t>(rows.size(), n), scale_bits};
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != n) {
      throw Error(ErrorCode::kShapeMismatch, "ragged gradient rows");
    }
    std::copy(rows[x].begin(), rows[x].end(), g.values.row(x).begin());
  }
  return g;
}

PadSet sample_pads(std::size_t m, std::size_t n, int pad_bits, Rng& rng) {
  if (pad_bits < 1 || pad_bits > 62) {
    throw Error(ErrorCode::kInvalidArgument,
                "pad_bits must be in [1, 62], got " + std::to_string(pad_bits));
  }
  const std::int64_t hi = (std::int64_t{1} << pad_bits) - 1;
  PadSet pads;
  pads.r.resize(n);
  for (auto& v : pads.r) v = uniform_int(rng, 0, hi);
  pads.s.resize(m);
  for (auto& v : pads.s) v = uniform_int(rng, 1, std::max<std::int64_t>(1, hi));
  pads.s_y = uniform_int(rng, 1, std::max<std::int64_t>(1, hi));
  pads.t.resize(m);
  for (auto& v : pads.t) v = uniform_int(rng, 0, hi);
  return pads;
}

EncryptedVector user_submit(const StatVector& gradient, std::size_t expected_n,
                            const PublicKey& pk, Rng& rng) {
  if (gradient.size() != expected_n) {
    throw Error(ErrorCode::kInvalidArgument,
                "gradient has " + std::to_string(gradient.size()) +
                    " coordinates, pipeline expects " +
                    std::to_string(expected_n));
  }
  EncryptedVector out;
  out.reserve(gradient.size());
  for (std::int64_t v : gradient.raw) out.push_back(encrypt(pk, v, rng));
  return out;
}

EncryptedMatrix submit_all(const GradientMatrix& g, const PublicKey& pk,
                           Rng& rng) {
  EncryptedMatrix out(g.m(), g.n());
  for (std::size_t x = 0; x < g.m(); ++x) {
    EncryptedVector row = user_submit(g.row(x), g.n(), pk, rng);
    std::move(row.begin(), row.end(), out.row(x).begin());
  }
  return out;
}

EncryptedVector secmed(const EncryptedMatrix& encrypted, const PadSet& pads,
                       const KeyPair& keys, Rng& cp_rng, CloudViews& views) {
  const std::size_t m = encrypted.rows();
  const std::size_t n = encrypted.cols();
  if (pads.r.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "need one SecMed pad per coordinate");
  }
  const PublicKey& pk = keys.public_key;

  // SP: same pad r[i] for every user at coordinate i.
  EncryptedMatrix masked(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      masked(x, i) = add_plain(pk, encrypted(x, i), pads.r[i]);
    }
  }

  // CP: decrypt, record, median per column, re-encrypt.
  views.secmed = Matrix<Wide>(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      views.secmed(x, i) = decrypt(keys.secret_key, masked(x, i));
    }
  }
  views.medians_padded.assign(n, 0);
  EncryptedVector median_ct(n);
  for (std::size_t i = 0; i < n; ++i) {
    views.medians_padded[i] = median_int(views.secmed.column(i));
    median_ct[i] = encrypt(pk, views.medians_padded[i], cp_rng);
  }

  // SP: strip r[i] under encryption.
  for (std::size_t i = 0; i < n; ++i) {
    median_ct[i] = add_plain(pk, median_ct[i], -static_cast<Wide>(pads.r[i]));
  }
  return median_ct;
}

std::vector<std::optional<double>> secpear(const EncryptedMatrix& encrypted,
                                           const EncryptedVector& median,
                                           const PadSet& pads,
                                           const KeyPair& keys,
                                           CloudViews& views) {
  const std::size_t m = encrypted.rows();
  const std::size_t n = encrypted.cols();
  if (pads.s.size() != m || median.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "SecPear input shapes disagree");
  }
  if (pads.s_y <= 0 ||
      std::any_of(pads.s.begin(), pads.s.end(),
                  [](std::int64_t s) { return s <= 0; })) {
    throw Error(ErrorCode::kInvalidArgument,
                "multiplicative pads must be positive");
  }
  const PublicKey& pk = keys.public_key;

  // SP: one pad per user, shared by all of that user's coordinates.
  EncryptedMatrix masked(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      masked(x, i) = mul_plain(pk, encrypted(x, i), pads.s[x]);
    }
  }
  EncryptedVector masked_median(n);
  for (std::size_t i = 0; i < n; ++i) {
    masked_median[i] = mul_plain(pk, median[i], pads.s_y);
  }

  // CP: decrypt, record, correlate on padded values.
  views.secpear = Matrix<Wide>(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      views.secpear(x, i) = decrypt(keys.secret_key, masked(x, i));
    }
  }
  views.secpear_median.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    views.secpear_median[i] = decrypt(keys.secret_key, masked_median[i]);
  }
  std::vector<std::optional<double>> rho(m);
  for (std::size_t x = 0; x < m; ++x) {
    rho[x] = pearson_exact(views.secpear.row(x), views.secpear_median);
  }
  return rho;
}

Wide divide_round_half_even(Wide num, Wide den) {
  if (den <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "divisor must be positive");
  }
  Wide q = num / den;
  Wide r = num % den;  // same sign as num
  if (r < 0) {
    r += den;
    q -= 1;
  }
  // Now num = q * den + r with 0 <= r < den.
  const Wide twice = 2 * r;
  if (twice > den || (twice == den && (q % 2 != 0))) q += 1;
  return q;
}

SecAggOutput secagg(const EncryptedMatrix& encrypted,
                    std::span<const double> weights, const PadSet& pads,
                    const KeyPair& keys, Rng& cp_rng, CloudViews& views,
                    int weight_scale_bits) {
  const std::size_t m = encrypted.rows();
  const std::size_t n = encrypted.cols();
  if (pads.t.size() != m || weights.size() != m) {
    throw Error(ErrorCode::kShapeMismatch, "SecAgg input shapes disagree");
  }
  if (m == 0) throw Error(ErrorCode::kEmptyInput, "SecAgg needs a user");
  const PublicKey& pk = keys.public_key;

  // SP: one additive pad per user, shared across coordinates.
  EncryptedMatrix masked(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      masked(x, i) = add_plain(pk, encrypted(x, i), pads.t[x]);
    }
  }

  // CP: decrypt, record, weight and sum. CP knows the weights because it
  // computed rho.
  views.secagg = Matrix<Wide>(m, n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      views.secagg(x, i) = decrypt(keys.secret_key, masked(x, i));
    }
  }
  std::vector<std::int64_t> wq(m);
  for (std::size_t x = 0; x < m; ++x) {
    wq[x] = quantize_weight(weights[x], weight_scale_bits);
  }
  EncryptedVector weighted_sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    Wide acc = 0;
    for (std::size_t x = 0; x < m; ++x) acc += wq[x] * views.secagg(x, i);
    weighted_sum[i] = encrypt(pk, acc, cp_rng);
  }
  EncryptedVector weight_ct(m);
  for (std::size_t x = 0; x < m; ++x) weight_ct[x] = encrypt(pk, wq[x], cp_rng);

  // SP: Enc(sum w t) from Enc(w) and its own t, then subtract.
  Ciphertext pad_mass = mul_plain(pk, weight_ct[0], pads.t[0]);
  Ciphertext total_weight = weight_ct[0];
  for (std::size_t x = 1; x < m; ++x) {
    pad_mass = add_ct(pk, pad_mass, mul_plain(pk, weight_ct[x], pads.t[x]));
    total_weight = add_ct(pk, total_weight, weight_ct[x]);
  }
  const Ciphertext neg_pad_mass = mul_plain(pk, pad_mass, -1);
  for (std::size_t i = 0; i < n; ++i) {
    weighted_sum[i] = add_ct(pk, weighted_sum[i], neg_pad_mass);
  }

  // Release of the global update.
  SecAggOutput out;
  out.aggregate.scale_bits = kDefaultScaleBits;
  out.aggregate.raw.assign(n, 0);
  out.weights.resize(m);
  for (std::size_t x = 0; x < m; ++x) {
    out.weights[x] = std::ldexp(static_cast<double>(wq[x]), -weight_scale_bits);
  }
  const Wide released_weight = decrypt(keys.secret_key, total_weight);
  if (released_weight == 0) {
    out.all_weights_zero = true;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Wide num = decrypt(keys.secret_key, weighted_sum[i]);
    out.aggregate.raw[i] =
        static_cast<std::int64_t>(divide_round_half_even(num, released_weight));
  }
  return out;
}

void validate_round_input(const GradientMatrix& g,
                          const PipelineConfig& config) {
  if (g.m() < 3 || g.n() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a round needs m >= 3 users and n >= 2 coordinates, got " +
                    std::to_string(g.m()) + "x" + std::to_string(g.n()));
  }
  if (g.scale_bits != config.format.scale_bits) {
    throw Error(ErrorCode::kInvalidArgument, "gradient scale_bits mismatch");
  }
  const std::int64_t limit = config.format.raw_limit();
  for (std::int64_t v : g.values.data()) {
    if (v >= limit || v <= -limit) {
      throw Error(ErrorCode::kRange,
                  "gradient entry " + std::to_string(v) +
                      " outside fixed-point range");
    }
  }
}

RoundResult run_round(const GradientMatrix& g, const PipelineConfig& config,
                      std::uint64_t seed) {
  return run_round(g, config, seed,
                   keygen(config.backend, config.key_bits,
                          derive_seed(seed, kKeyStream)));
}

RoundResult run_round(const GradientMatrix& g, const PipelineConfig& config,
                      std::uint64_t seed, const KeyPair& keys) {
  validate_round_input(g, config);
  Rng pad_rng(derive_seed(seed, kPadStream));
  Rng user_rng(derive_seed(seed, kUserStream));
  Rng cp_rng(derive_seed(seed, kCloudStream));

  RoundResult result;
  result.pads = sample_pads(g.m(), g.n(), config.pad_bits, pad_rng);

  const EncryptedMatrix encrypted = submit_all(g, keys.public_key, user_rng);
  const EncryptedVector median_ct =
      secmed(encrypted, result.pads, keys, cp_rng, result.views);
  result.rho = secpear(encrypted, median_ct, result.pads, keys, result.views);

  std::vector<double> weights(g.m());
  for (std::size_t x = 0; x < g.m(); ++x) weights[x] = config.weight(result.rho[x]);

  SecAggOutput agg = secagg(encrypted, weights, result.pads, keys, cp_rng,
                            result.views, config.weight_scale_bits);
  result.aggregate = std::move(agg.aggregate);
  result.aggregate.scale_bits = g.scale_bits;
  result.weights = std::move(agg.weights);
  result.all_weights_zero = agg.all_weights_zero;

  // The median is part of the round's public outcome.
  result.median.scale_bits = g.scale_bits;
  result.median.raw.resize(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    result.median.raw[i] =
        static_cast<std::int64_t>(decrypt(keys.secret_key, median_ct[i]));
  }
  return result;
}

}  // namespace pefl
