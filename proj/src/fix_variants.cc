#include "pefl/fix_variants.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pefl/error.h"
#include "pefl/stats.h"

namespace pefl {

Matrix<std::int64_t> sample_pad_matrix(std::size_t rows, std::size_t cols,
                                       std::int64_t lo, std::int64_t hi,
                                       Rng& rng) {
  Matrix<std::int64_t> pads(rows, cols);
  for (std::size_t x = 0; x < rows; ++x) {
    for (auto& v : pads.row(x)) v = uniform_int(rng, lo, hi);
  }
  return pads;
}

SecMedFixResult fix_variant_secmed(const GradientMatrix& g,
                                   const Matrix<std::int64_t>& pads,
                                   UnpadRule rule) {
  if (pads.rows() != g.m() || pads.cols() != g.n()) {
    throw Error(ErrorCode::kShapeMismatch, "need one pad per user and coordinate");
  }
  const std::size_t m = g.m();
  const std::size_t n = g.n();
  SecMedFixResult out;
  out.unpadded.resize(n);
  out.true_median.resize(n);
  out.delta.resize(n);
  out.selected_user.resize(n);
  std::size_t wrong = 0;
  std::vector<Wide> padded(m);
  std::vector<std::int64_t> column(m);
  for (std::size_t i = 0; i < n; ++i) {
    Wide pad_sum = 0;
    for (std::size_t x = 0; x < m; ++x) {
      column[x] = g(x, i);
      padded[x] = static_cast<Wide>(g(x, i)) + pads(x, i);
      pad_sum += pads(x, i);
    }
    // CP's side is unchanged: median of what it decrypts.
    const std::size_t sel = median_index(std::span<const Wide>(padded));
    const Wide unpad = rule == UnpadRule::kSelectedUserPad
                           ? static_cast<Wide>(pads(sel, i))
                           : divide_round_half_even(pad_sum, static_cast<Wide>(m));
    out.selected_user[i] = sel;
    out.unpadded[i] = padded[sel] - unpad;
    out.true_median[i] = median_int(column);
    out.delta[i] = wide_abs(out.unpadded[i] - out.true_median[i]);
    if (out.delta[i] != 0) ++wrong;
  }
  out.wrong_fraction =
      n == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(n);
  return out;
}

SecPearFixResult fix_variant_secpear(const GradientMatrix& g,
                                     const Matrix<std::int64_t>& user_pads,
                                     const std::vector<std::int64_t>& median_pads) {
  const std::size_t m = g.m();
  const std::size_t n = g.n();
  if (user_pads.rows() != m || user_pads.cols() != n || median_pads.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "need one pad per user and coordinate plus one per median entry");
  }
  std::vector<Wide> median(n);
  std::vector<Wide> median_padded(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> column = g.values.column(i);
    median[i] = median_int(column);
    median_padded[i] = median[i] * median_pads[i];
  }

  SecPearFixResult out;
  std::vector<Wide> row(n);
  std::vector<Wide> row_padded(n);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = g(x, i);
      row_padded[i] = row[i] * user_pads(x, i);
    }
    const auto truth = pearson_exact(row, median);
    const auto padded = pearson_exact(row_padded, median_padded);
    if (!truth || !padded) {
      throw Error(ErrorCode::kDegenerateVector,
                  "row " + std::to_string(x) + " or the median is constant");
    }
    out.rho_true.push_back(*truth);
    out.rho_padded.push_back(*padded);
    out.delta.push_back(std::fabs(*padded - *truth));
  }
  if (!out.delta.empty()) {
    out.mean_delta = std::accumulate(out.delta.begin(), out.delta.end(), 0.0) /
                     static_cast<double>(out.delta.size());
    out.max_delta = *std::max_element(out.delta.begin(), out.delta.end());
  }
  return out;
}

double SecMedFixCheck::failure_rate() const {
  return coordinates == 0 ? 0.0
                          : static_cast<double>(wrong) /
                                static_cast<double>(coordinates);
}

double SecMedFixCheck::failure_rate_selected_pad() const {
  return coordinates == 0 ? 0.0
                          : static_cast<double>(wrong_selected_pad) /
                                static_cast<double>(coordinates);
}

SecMedFixCheck fixcheck_secmed(const ScenarioConfig& config,
                               std::size_t coordinates, std::uint64_t seed) {
  SecMedFixCheck check;
  const std::int64_t pad_hi = (std::int64_t{1} << config.pad_bits) - 1;
  for (std::uint64_t instance = 0; check.coordinates < coordinates; ++instance) {
    const std::uint64_t s = derive_seed(seed, instance);
    const Population pop = gen_population(config, s);
    const GradientMatrix& g = pop.gradients;
    Rng rng(derive_seed(s, 0x66697863));
    const auto pads = sample_pad_matrix(g.m(), g.n(), 0, pad_hi, rng);
    const auto blind = fix_variant_secmed(g, pads, UnpadRule::kMeanPad);
    const auto selected = fix_variant_secmed(g, pads, UnpadRule::kSelectedUserPad);
    const std::size_t take = std::min(g.n(), coordinates - check.coordinates);
    for (std::size_t i = 0; i < take; ++i) {
      check.wrong += blind.delta[i] != 0;
      check.wrong_selected_pad += selected.delta[i] != 0;
      check.max_delta = std::max(check.max_delta, blind.delta[i]);
    }
    check.coordinates += take;
  }
  return check;
}

SecPearFixCheck fixcheck_secpear(const ScenarioConfig& config,
                                 std::size_t instances, std::uint64_t seed,
                                 int pad_bits) {
  SecPearFixCheck check;
  check.instances = instances;
  const std::int64_t hi = std::int64_t{1} << pad_bits;
  double sum = 0.0;
  check.min_delta = instances == 0 ? 0.0 : 1e300;
  for (std::size_t k = 0; k < instances; ++k) {
    const std::uint64_t s = derive_seed(seed, k);
    const Population pop = gen_population(config, s);
    Rng rng(derive_seed(s, 0x70656172));
    const auto pads = sample_pad_matrix(pop.gradients.m(), pop.gradients.n(), 1,
                                        hi, rng);
    const auto median_pads = sample_pad_matrix(1, pop.gradients.n(), 1, hi, rng);
    const auto result = fix_variant_secpear(
        pop.gradients, pads,
        std::vector<std::int64_t>(median_pads.row(0).begin(),
                                  median_pads.row(0).end()));
    sum += result.mean_delta;
    check.min_delta = std::min(check.min_delta, result.mean_delta);
    check.max_delta = std::max(check.max_delta, result.mean_delta);
  }
  check.mean_delta = instances == 0 ? 0.0 : sum / static_cast<double>(instances);
  return check;
}

}  // namespace pefl
