#ifndef PEFL_SIDE_INFORMATION_H_
#define PEFL_SIDE_INFORMATION_H_

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace pefl {

// CP took part in the round as an ordinary user and knows its own gradient.
struct OwnRow {
  std::size_t row = 0;  // CP's row index in the views
  std::vector<std::int64_t> values;
};

// CP knows a single gradient entry g[x][i].
struct SingleEntry {
  std::size_t x = 0;
  std::size_t i = 0;
  std::int64_t value = 0;
};

using SideInformation = std::variant<std::monostate, OwnRow, SingleEntry>;

}  // namespace pefl

#endif  // PEFL_SIDE_INFORMATION_H_
