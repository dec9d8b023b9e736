#include "pefl/attacks.h"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>
#include <utility>

#include "pefl/error.h"

namespace pefl {
namespace {

std::string idx(std::size_t v) { return std::to_string(v); }

void check_same_shape(const Matrix<Wide>& a, const Matrix<Wide>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "views have different shapes");
  }
}

AttackReport empty_report(AttackMethod method, std::size_t m, std::size_t n) {
  AttackReport report;
  report.method = method;
  report.recovered = Matrix<std::optional<Wide>>(m, n);
  report.pads.r.assign(n, std::nullopt);
  report.pads.s.assign(m, std::nullopt);
  report.pads.t.assign(m, std::nullopt);
  return report;
}

std::optional<Wide> exact_quotient(Wide num, Wide den) {
  if (den == 0 || num % den != 0) return std::nullopt;
  return num / den;
}

Wide gcd_wide(Wide a, Wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b != 0) a = std::exchange(b, a % b);
  return a;
}

// Unpads row x of SecPear with s and checks the result against SecAgg
// shifted by t. Returns false (leaving the row untouched) on any mismatch.
bool recover_row_combined(const Matrix<Wide>& secpear,
                          const Matrix<Wide>& secagg, std::size_t x, Wide s,
                          Wide t, AttackReport& report) {
  const std::size_t n = secpear.cols();
  std::vector<Wide> row(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto g = exact_quotient(secpear(x, k), s);
    if (!g || secagg(x, k) - t != *g) {
      report.diagnostics.push_back("row " + idx(x) + ": coordinate " + idx(k) +
                                   " disagrees with recovered pads");
      return false;
    }
    row[k] = *g;
  }
  for (std::size_t k = 0; k < n; ++k) report.recovered(x, k) = row[k];
  return true;
}

}  // namespace

PadPairSolution solve_pad_pair(Wide a1, Wide a2, Wide b1, Wide b2) {
  const Wide delta = b2 - b1;
  if (delta == 0) {
    throw Error(ErrorCode::kZeroDelta,
                "equal coordinates carry no information about the pads");
  }
  const auto s = exact_quotient(a2 - a1, delta);
  if (!s || *s <= 0) {
    throw Error(ErrorCode::kInconsistentViews,
                "a2 - a1 = " + wide_to_string(a2 - a1) +
                    " is not a positive multiple of delta = " +
                    wide_to_string(delta));
  }
  const auto g_i = exact_quotient(a1, *s);
  if (!g_i) {
    throw Error(ErrorCode::kInconsistentViews,
                "a1 = " + wide_to_string(a1) + " not divisible by s = " +
                    wide_to_string(*s));
  }
  return PadPairSolution{*g_i, *g_i + delta, *s, b1 - *g_i};
}

AttackReport attack_combined(const Matrix<Wide>& secpear,
                             const Matrix<Wide>& secagg) {
  check_same_shape(secpear, secagg);
  const std::size_t m = secpear.rows();
  const std::size_t n = secpear.cols();
  AttackReport report = empty_report(AttackMethod::kCombined, m, n);

  for (std::size_t x = 0; x < m; ++x) {
    std::optional<std::pair<std::size_t, std::size_t>> anchor;
    for (std::size_t i = 0; i < n && !anchor; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (secagg(x, j) != secagg(x, i)) {
          anchor = {i, j};
          break;
        }
      }
    }
    if (!anchor) {
      report.diagnostics.push_back("row " + idx(x) +
                                   ": all coordinates equal, no usable pair");
      continue;
    }
    const auto [i, j] = *anchor;
    PadPairSolution sol;
    try {
      sol = solve_pad_pair(secpear(x, i), secpear(x, j), secagg(x, i),
                           secagg(x, j));
    } catch (const Error& e) {
      report.diagnostics.push_back("row " + idx(x) + ": pair (" + idx(i) +
                                   ", " + idx(j) + ") " + e.what());
      continue;
    }
    if (!recover_row_combined(secpear, secagg, x, sol.s, sol.t, report)) {
      continue;
    }
    report.pads.s[x] = sol.s;
    report.pads.t[x] = sol.t;
    report.diagnostics.push_back("row " + idx(x) + ": anchor (" + idx(i) +
                                 ", " + idx(j) + ") s=" +
                                 wide_to_string(sol.s) +
                                 " t=" + wide_to_string(sol.t));
  }
  report.finalize();
  return report;
}

AttackReport attack_combined(const CloudViews& views) {
  return attack_combined(views.secpear, views.secagg);
}

std::vector<std::vector<ColumnDifference>> attack_secmed_diffs(
    const Matrix<Wide>& secmed) {
  const std::size_t m = secmed.rows();
  std::vector<std::vector<ColumnDifference>> out(secmed.cols());
  for (std::size_t i = 0; i < secmed.cols(); ++i) {
    out[i].reserve(m * (m - std::min<std::size_t>(m, 1)) / 2);
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t z = x + 1; z < m; ++z) {
        out[i].push_back({x, z, secmed(x, i) - secmed(z, i)});
      }
    }
  }
  return out;
}

AttackReport attack_cp_as_user(const Matrix<Wide>& secmed,
                               const SideInformation& own_row,
                               int value_bits) {
  const auto* own = std::get_if<OwnRow>(&own_row);
  const std::size_t m = secmed.rows();
  const std::size_t n = secmed.cols();
  if (own == nullptr) {
    throw Error(ErrorCode::kRowMismatch, "side information is not an own row");
  }
  if (own->row >= m || own->values.size() != n) {
    throw Error(ErrorCode::kRowMismatch,
                "own row " + idx(own->row) + " with " + idx(own->values.size()) +
                    " values does not fit a " + idx(m) + "x" + idx(n) +
                    " view");
  }
  AttackReport report = empty_report(AttackMethod::kCpAsUser, m, n);
  const Wide limit = wide_pow2(value_bits - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Wide r = secmed(own->row, i) - own->values[i];
    report.pads.r[i] = r;
    for (std::size_t x = 0; x < m; ++x) {
      const Wide g = secmed(x, i) - r;
      if (wide_abs(g) >= limit) {
        throw Error(ErrorCode::kRowMismatch,
                    "unpadded entry (" + idx(x) + ", " + idx(i) +
                        ") falls outside the gradient range");
      }
      report.recovered(x, i) = g;
    }
  }
  report.diagnostics.push_back("column pads read off own row " +
                               idx(own->row));
  report.finalize();
  return report;
}

AttackReport attack_single_known(const Matrix<Wide>& secmed,
                                 const Matrix<Wide>& secpear,
                                 const SideInformation& entry) {
  check_same_shape(secmed, secpear);
  const auto* known = std::get_if<SingleEntry>(&entry);
  const std::size_t m = secmed.rows();
  const std::size_t n = secmed.cols();
  if (known == nullptr || known->x >= m || known->i >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "single-known attack needs an in-range SingleEntry");
  }
  if (known->value == 0) {
    throw Error(ErrorCode::kZeroAnchor,
                "a zero entry cannot reveal a multiplicative pad");
  }

  AttackReport report = empty_report(AttackMethod::kSingleKnown, m, n);
  auto& rec = report.recovered;
  std::deque<std::pair<std::size_t, std::size_t>> work;
  auto learn = [&](std::size_t x, std::size_t i, Wide v) {
    if (rec(x, i)) {
      if (*rec(x, i) != v) {
        report.diagnostics.push_back("conflict at (" + idx(x) + ", " + idx(i) +
                                     ")");
      }
      return;
    }
    rec(x, i) = v;
    work.emplace_back(x, i);
  };

  learn(known->x, known->i, known->value);
  std::size_t column_steps = 0;
  std::size_t row_steps = 0;
  while (!work.empty()) {
    const auto [x, i] = work.front();
    work.pop_front();
    const Wide v = *rec(x, i);
    if (!report.pads.r[i]) {
      const Wide r = secmed(x, i) - v;
      report.pads.r[i] = r;
      ++column_steps;
      for (std::size_t z = 0; z < m; ++z) learn(z, i, secmed(z, i) - r);
    }
    if (!report.pads.s[x] && v != 0) {
      const auto s = exact_quotient(secpear(x, i), v);
      if (!s || *s <= 0) {
        report.diagnostics.push_back("row " + idx(x) +
                                     ": SecPear entry not a positive multiple"
                                     " of the recovered value");
        continue;
      }
      report.pads.s[x] = *s;
      ++row_steps;
      for (std::size_t k = 0; k < n; ++k) {
        const auto g = exact_quotient(secpear(x, k), *s);
        if (!g) {
          report.diagnostics.push_back("row " + idx(x) + ": coordinate " +
                                       idx(k) + " not divisible by s");
          continue;
        }
        learn(x, k, *g);
      }
    }
  }
  report.diagnostics.push_back(
      "anchor (" + idx(known->x) + ", " + idx(known->i) + "); closure used " +
      idx(column_steps) + " column pads and " + idx(row_steps) +
      " row pads (iterated to a fixpoint, beyond the single anchor step)");
  report.finalize();
  const std::size_t missing = m * n - report.recovered_count();
  if (missing > 0) {
    report.diagnostics.push_back(idx(missing) +
                                 " entries unreachable from the anchor");
  }
  return report;
}

ProbabilisticResult attack_probabilistic(const Matrix<Wide>& secmed,
                                         const Matrix<Wide>& secpear,
                                         const SideInformation& anchor,
                                         const ProbabilisticOptions& options) {
  check_same_shape(secmed, secpear);
  const std::size_t m = secmed.rows();
  const std::size_t n = secmed.cols();
  ProbabilisticResult result;
  result.report = empty_report(AttackMethod::kProbabilistic, m, n);
  AttackReport& report = result.report;

  // Collision scan, one column at a time.
  std::vector<std::pair<Wide, std::size_t>> column(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < m; ++x) column[x] = {secmed(x, i), x};
    std::sort(column.begin(), column.end());
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const Wide distance = column[b].first - column[a].first;
        if (distance > options.near_tolerance) break;
        const std::size_t x = std::min(column[a].second, column[b].second);
        const std::size_t z = std::max(column[a].second, column[b].second);
        if (distance != 0) {
          result.near_collisions.push_back({x, z, i, distance});
          continue;
        }
        EqualityConstraint c{x, z, i, std::nullopt, std::nullopt};
        Wide num = secpear(x, i);
        Wide den = secpear(z, i);
        if (num != 0 && den != 0) {
          const Wide g = gcd_wide(num, den);
          num /= g;
          den /= g;
          if (den < 0) {
            num = -num;
            den = -den;
          }
          c.ratio_num = num;
          c.ratio_den = den;
        }
        result.constraints.push_back(c);
      }
    }
  }
  report.diagnostics.push_back(idx(result.constraints.size()) +
                               " equality constraints, " +
                               idx(result.near_collisions.size()) +
                               " near collisions");

  const auto* start = std::get_if<SingleEntry>(&anchor);
  if (start == nullptr) {
    report.finalize();
    return result;
  }
  if (start->x >= m || start->i >= n) {
    throw Error(ErrorCode::kInvalidArgument, "anchor outside the views");
  }

  std::vector<std::vector<const EqualityConstraint*>> adjacent(m);
  for (const auto& c : result.constraints) {
    adjacent[c.x].push_back(&c);
    adjacent[c.z].push_back(&c);
  }
  auto recover_row = [&](std::size_t x, std::size_t i, Wide value) {
    if (report.pads.s[x] || value == 0) return false;
    const auto s = exact_quotient(secpear(x, i), value);
    if (!s || *s <= 0) return false;
    std::vector<Wide> row(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto g = exact_quotient(secpear(x, k), *s);
      if (!g) return false;
      row[k] = *g;
    }
    report.pads.s[x] = *s;
    for (std::size_t k = 0; k < n; ++k) report.recovered(x, k) = row[k];
    return true;
  };

  if (!recover_row(start->x, start->i, start->value)) {
    report.diagnostics.push_back("anchor cannot start propagation");
    report.finalize();
    return result;
  }
  std::deque<std::size_t> frontier{start->x};
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop_front();
    for (const EqualityConstraint* c : adjacent[u]) {
      const std::size_t w = c->x == u ? c->z : c->x;
      if (report.pads.s[w]) continue;
      if (recover_row(w, c->i, *report.recovered(u, c->i))) {
        report.diagnostics.push_back("row " + idx(w) + " via row " + idx(u) +
                                     " at coordinate " + idx(c->i));
        frontier.push_back(w);
      }
    }
  }
  report.finalize();
  return result;
}

std::string_view attack_method_name(AttackMethod method) {
  switch (method) {
    case AttackMethod::kCombined: return "combined";
    case AttackMethod::kCpAsUser: return "cp-user";
    case AttackMethod::kSingleKnown: return "single-known";
    case AttackMethod::kProbabilistic: return "probabilistic";
  }
  return "unknown";
}

std::size_t AttackReport::recovered_count() const {
  const auto data = recovered.data();
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(),
                    [](const std::optional<Wide>& v) { return v.has_value(); }));
}

void AttackReport::finalize() {
  const std::size_t total = recovered.rows() * recovered.cols();
  coverage = total == 0 ? 0.0
                        : static_cast<double>(recovered_count()) /
                              static_cast<double>(total);
  unrecovered_rows.clear();
  for (std::size_t x = 0; x < recovered.rows(); ++x) {
    const auto row = recovered.row(x);
    if (std::none_of(row.begin(), row.end(),
                     [](const std::optional<Wide>& v) { return v.has_value(); })) {
      unrecovered_rows.push_back(x);
    }
  }
}

}  // namespace pefl
