#ifndef PEFL_WEIGHT_H_
#define PEFL_WEIGHT_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pefl {

// Maps a user's Pearson coefficient (nullopt when undefined) to its
// aggregation weight.
using WeightFunction = std::function<double(std::optional<double>)>;

inline constexpr double kRhoClamp = 0.999999;

// max(0, ln((1 + rho) / (1 - rho)) - 0.5), rho clamped to +-kRhoClamp;
// undefined rho gets 0.
double weight_from_rho(std::optional<double> rho);

inline constexpr std::string_view kDefaultWeightFunction = "log_odds";

// Known ids: "log_odds" (weight_from_rho), "relu" (max(0, rho)),
// "uniform" (1 for every defined rho). Throws kInvalidArgument otherwise.
WeightFunction weight_function_by_id(std::string_view id);
std::vector<std::string> weight_function_ids();

}  // namespace pefl

#endif  // PEFL_WEIGHT_H_
