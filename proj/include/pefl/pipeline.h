#ifndef PEFL_PIPELINE_H_
#define PEFL_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pefl/cloud_views.h"
#include "pefl/fixed_point.h"
#include "pefl/gradient_matrix.h"
#include "pefl/he.h"
#include "pefl/matrix.h"
#include "pefl/pad_set.h"
#include "pefl/rng.h"
#include "pefl/weight.h"

namespace pefl {

// One PEFL round: users encrypt under CP's key, SP masks and forwards to CP,
// CP decrypts and computes. A single key pair owned by CP stands in for the
// full key choreography; every leaked view is something CP decrypts with it.

using EncryptedVector = std::vector<Ciphertext>;
using EncryptedMatrix = Matrix<Ciphertext>;

inline constexpr int kDefaultWeightScaleBits = 20;

struct PipelineConfig {
  FixedPointFormat format;
  int pad_bits = kDefaultPadBits;
  // CP quantises weights to multiples of 2^-weight_scale_bits before using
  // them as plaintext scalars.
  int weight_scale_bits = kDefaultWeightScaleBits;
  Backend backend = Backend::kTransparent;
  int key_bits = kDefaultKeyBits;
  WeightFunction weight = weight_from_rho;
};

// User side: element-wise encryption of one gradient vector. Throws
// kInvalidArgument if the length differs from `expected_n`.
EncryptedVector user_submit(const StatVector& gradient, std::size_t expected_n,
                            const PublicKey& pk, Rng& rng);

EncryptedMatrix submit_all(const GradientMatrix& g, const PublicKey& pk,
                           Rng& rng);

// Coordinate-wise median. SP adds r[i] to every user's entry i, CP decrypts
// (recording views.secmed), takes median_int per column, re-encrypts, and SP
// subtracts r[i] homomorphically. Returns Enc(g_y).
EncryptedVector secmed(const EncryptedMatrix& encrypted, const PadSet& pads,
                       const KeyPair& keys, Rng& cp_rng, CloudViews& views);

// Pearson coefficient of each user against the median. SP multiplies row x
// by s[x] and the median by s_y; CP decrypts (recording views.secpear and
// views.secpear_median) and evaluates rho on the padded integers. A
// constant row or median yields nullopt.
std::vector<std::optional<double>> secpear(const EncryptedMatrix& encrypted,
                                           const EncryptedVector& median,
                                           const PadSet& pads,
                                           const KeyPair& keys,
                                           CloudViews& views);

struct SecAggOutput {
  StatVector aggregate;
  // The weights actually applied, after quantisation.
  std::vector<double> weights;
  bool all_weights_zero = false;
};

// Weighted aggregation. SP adds t[x] to row x, CP decrypts (recording
// views.secagg), forms sum_x w_x (g[x] + t[x]) and Enc(w_x), and SP removes
// sum_x w_x t[x] homomorphically. The single division by sum_x w_x happens
// after release and is rounded half-to-even. A zero weight sum gives a zero
// vector with all_weights_zero set.
SecAggOutput secagg(const EncryptedMatrix& encrypted,
                    std::span<const double> weights, const PadSet& pads,
                    const KeyPair& keys, Rng& cp_rng, CloudViews& views,
                    int weight_scale_bits = kDefaultWeightScaleBits);

struct RoundResult {
  StatVector median;
  std::vector<std::optional<double>> rho;
  std::vector<double> weights;
  StatVector aggregate;
  bool all_weights_zero = false;
  CloudViews views;
  PadSet pads;  // held by SP; exposed for verification only

  bool operator==(const RoundResult&) const = default;
};

// Throws kInvalidArgument unless m >= 3, n >= 2 and every entry fits the
// configured fixed-point range.
void validate_round_input(const GradientMatrix& g, const PipelineConfig& config);

// user_submit -> secmed -> secpear -> weights -> secagg, deterministic in
// `seed`. Pads come from their own stream, so switching backends leaves
// views and aggregate unchanged.
RoundResult run_round(const GradientMatrix& g, const PipelineConfig& config,
                      std::uint64_t seed);
// Same, with caller-provided keys (skips Paillier key generation).
RoundResult run_round(const GradientMatrix& g, const PipelineConfig& config,
                      std::uint64_t seed, const KeyPair& keys);

// Round-half-to-even of num / den for den > 0.
Wide divide_round_half_even(Wide num, Wide den);

}  // namespace pefl

#endif  // PEFL_PIPELINE_H_
