#include "pefl/weight.h"

#include <algorithm>
#include <cmath>

#include "pefl/error.h"

namespace pefl {

double weight_from_rho(std::optional<double> rho) {
  if (!rho || std::isnan(*rho)) return 0.0;
  const double r = std::clamp(*rho, -kRhoClamp, kRhoClamp);
  return std::max(0.0, std::log((1.0 + r) / (1.0 - r)) - 0.5);
}

WeightFunction weight_function_by_id(std::string_view id) {
  if (id == "log_odds") return weight_from_rho;
  if (id == "relu") {
    return [](std::optional<double> rho) {
      return rho ? std::max(0.0, *rho) : 0.0;
    };
  }
  if (id == "uniform") {
    return [](std::optional<double> rho) { return rho ? 1.0 : 0.0; };
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown weight function '" + std::string(id) + "'");
}

std::vector<std::string> weight_function_ids() {
  return {"log_odds", "relu", "uniform"};
}

}  // namespace pefl
