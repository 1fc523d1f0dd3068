#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellprime/arith.hpp"
#include "shellprime/shell.hpp"

namespace shellprime::mseries {

using arith::BigFloat;
using arith::BigInt;
using arith::BigRational;

/// The function fed to the non-sieving zeta identity. Both families have
/// f(1) = 1, so the n = 1 summand is the leading unit term.
struct FunctionFamily {
  enum class Kind { Integers, PrimeShell };

  Kind kind = Kind::Integers;
  std::uint32_t p = 0;  // shell power, PrimeShell only

  static FunctionFamily integers() { return {Kind::Integers, 0}; }
  static FunctionFamily prime_shell(std::uint32_t p) {
    if (p < 2 || !arith::is_small_prime(p))
      throw std::invalid_argument("prime_shell family: power must be prime");
    return {Kind::PrimeShell, p};
  }

  BigInt value(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("family value: n must be >= 1");
    if (kind == Kind::Integers) return BigInt(n);
    return pow(BigInt(n), p) - pow(BigInt(n - 1), p);  // = 1 at n = 1
  }

  /// Start of the nested-sum index tuples: the integer family indexes from 1,
  /// the prime-shell family from 2.
  std::uint64_t first_nested_index() const {
    return kind == Kind::Integers ? 1 : 2;
  }

  std::string label() const {
    return kind == Kind::Integers ? "integers" : "prime-shell";
  }

  bool operator==(const FunctionFamily&) const = default;
};

/// S = sum over n = 1..x of 1/f(n)^s, ascending, round-to-nearest at the
/// working precision.
inline BigFloat zeta_partial_sum(const FunctionFamily& family, std::uint64_t x,
                                 unsigned s, unsigned precision) {
  if (x < 1) throw std::invalid_argument("zeta_partial_sum: x must be >= 1");
  if (s < 1) throw std::invalid_argument("zeta_partial_sum: s must be >= 1");
  arith::PrecisionGuard guard(precision);
  BigFloat sum = 0;
  for (std::uint64_t n = 1; n <= x; ++n)
    sum += BigFloat(1) / BigFloat(pow(family.value(n), s));
  return sum;
}

/// P = product over n = 2..x of (1 - 1/f(n)^s), ascending.
inline BigFloat euler_partial_product(const FunctionFamily& family, std::uint64_t x,
                                      unsigned s, unsigned precision) {
  if (x < 2) throw std::invalid_argument("euler_partial_product: x must be >= 2");
  if (s < 1) throw std::invalid_argument("euler_partial_product: s must be >= 1");
  arith::PrecisionGuard guard(precision);
  BigFloat product = 1;
  for (std::uint64_t n = 2; n <= x; ++n)
    product *= BigFloat(1) - BigFloat(1) / BigFloat(pow(family.value(n), s));
  return product;
}

struct MSeriesResult {
  FunctionFamily family;
  std::uint64_t x = 0;
  unsigned s = 1;
  unsigned precision = arith::kDefaultFloatDigits;
  BigFloat sum;      // S
  BigFloat product;  // P
  BigFloat m;        // M = S * P - 1
};

inline MSeriesResult m_value(const FunctionFamily& family, std::uint64_t x, unsigned s = 1,
                             unsigned precision = arith::kDefaultFloatDigits) {
  arith::PrecisionGuard guard(precision);
  MSeriesResult r;
  r.family = family;
  r.x = x;
  r.s = s;
  r.precision = precision;
  r.sum = zeta_partial_sum(family, x, s, precision);
  r.product = euler_partial_product(family, x, s, precision);
  r.m = r.sum * r.product - 1;
  return r;
}

/// Exact-rational closed form (oracle mode, small x).
struct ExactMSeries {
  BigRational sum;
  BigRational product;
  BigRational m;
};

inline ExactMSeries m_value_exact(const FunctionFamily& family, std::uint64_t x,
                                  unsigned s = 1) {
  if (x < 2) throw std::invalid_argument("m_value_exact: x must be >= 2");
  ExactMSeries r;
  r.sum = 0;
  for (std::uint64_t n = 1; n <= x; ++n) r.sum += BigRational(1) / BigRational(pow(family.value(n), s));
  r.product = 1;
  for (std::uint64_t n = 2; n <= x; ++n)
    r.product *= BigRational(1) - BigRational(1) / BigRational(pow(family.value(n), s));
  r.m = r.sum * r.product - 1;
  return r;
}

struct EnumerationBudgetError : std::runtime_error {
  explicit EnumerationBudgetError(std::size_t budget)
      : std::runtime_error("nested-sum enumeration exceeded budget of " +
                           std::to_string(budget) + " tuples") {}
};

/// Exact-rational report on the nested alternating sums and the literal
/// term-elimination procedure behind the closed form.
///
/// Tuple convention per degree d: indices (i1 <= i2 < i3 < ... < id), the
/// second index may repeat the first, every later index advances by at
/// least one; sign is (-1)^(d-1). The truncated nested total is reported
/// against S*P - 1 with the gap left for the reader - the two are not equal
/// at finite x.
struct NestedSumReport {
  std::uint64_t x = 0;
  unsigned max_degree = 0;
  std::uint64_t first_index = 1;
  std::vector<BigRational> degree_sums;    // magnitude per degree, starting at degree 2
  std::vector<std::size_t> tuple_counts;   // tuples enumerated per degree
  BigRational alternating_total;           // signed sum across degrees
  BigRational closed_form;                 // S*P - 1 at the same truncation
  BigRational gap;                         // alternating_total - closed_form
  bool elimination_exact = false;          // elimination bookkeeping matched exactly
  std::size_t elimination_steps = 0;
};

inline NestedSumReport nested_sum_oracle(const FunctionFamily& family, std::uint64_t x,
                                         unsigned max_degree,
                                         std::size_t tuple_budget = 2'000'000) {
  if (x < 2) throw std::invalid_argument("nested_sum_oracle: x must be >= 2");
  if (x > 64) throw std::invalid_argument("nested_sum_oracle: x too large for enumeration");

  NestedSumReport report;
  report.x = x;
  report.max_degree = max_degree;
  report.first_index = family.first_nested_index();

  std::vector<BigRational> inverse(x + 1);
  for (std::uint64_t n = 1; n <= x; ++n) inverse[n] = BigRational(1) / BigRational(family.value(n));

  // Per-degree enumeration; the second index may equal the first, later
  // indices strictly advance.
  std::size_t enumerated = 0;
  for (unsigned degree = 2; degree <= max_degree; ++degree) {
    BigRational degree_sum = 0;
    std::size_t count = 0;
    std::vector<std::uint64_t> tuple(degree);
    auto recurse = [&](auto&& self, unsigned level, std::uint64_t from,
                       const BigRational& partial) -> void {
      if (level == degree) {
        degree_sum += partial;
        ++count;
        if (++enumerated > tuple_budget) throw EnumerationBudgetError(tuple_budget);
        return;
      }
      // The second index may repeat the first; every later index advances.
      for (std::uint64_t i = from; i <= x; ++i)
        self(self, level + 1, level == 0 ? i : i + 1, partial * inverse[i]);
    };
    recurse(recurse, 0, report.first_index, BigRational(1));
    report.degree_sums.push_back(degree_sum);
    report.tuple_counts.push_back(count);
    const bool negative = (degree % 2) == 0;  // sign (-1)^(degree-1)
    report.alternating_total += negative ? -degree_sum : degree_sum;
  }

  const ExactMSeries closed = m_value_exact(family, x, 1);
  report.closed_form = closed.m;
  report.gap = report.alternating_total - report.closed_form;

  // Literal elimination: repeatedly multiply the running identity by
  // 1/f(k) and subtract, k = 2..x, tracking the residual bookkeeping R
  // exactly. At every step the directly recomputed balance must equal the
  // tracked residual, and the final residual must equal S*P - 1.
  BigRational full_sum = 0;
  for (std::uint64_t n = 1; n <= x; ++n) full_sum += inverse[n];
  std::vector<BigRational> tail(x + 2);  // tail[k] = sum over n = k..x of 1/f(n)
  tail[x + 1] = 0;
  for (std::uint64_t k = x; k >= 2; --k) tail[k] = tail[k + 1] + inverse[k];

  BigRational lhs_factor = 1;
  BigRational residual = 0;
  bool exact = true;
  for (std::uint64_t k = 2; k <= x; ++k) {
    residual = residual * (BigRational(1) - inverse[k]) - tail[k] * inverse[k];
    lhs_factor *= BigRational(1) - inverse[k];
    const BigRational balance = lhs_factor * full_sum - 1 - tail[k + 1];
    if (balance != residual) {
      exact = false;
      break;
    }
  }
  report.elimination_exact = exact && residual == report.closed_form;
  report.elimination_steps = x - 1;
  return report;
}

struct LimitRow {
  FunctionFamily family;
  std::uint64_t x = 0;
  BigFloat m;
  std::optional<BigFloat> delta_from_prev;     // M(x) - M(previous x), same family
  std::optional<double> conjectured_limit;     // the anticipated x -> infinity value
};

struct LimitReport {
  std::vector<LimitRow> rows;
};

/// Anticipated infinite-x limits for the tabulated families.
inline std::optional<double> conjectured_limit(const FunctionFamily& family) {
  if (family.kind == FunctionFamily::Kind::Integers) return -1.0;
  switch (family.p) {
    case 2: return -0.8;
    case 3: return -0.051;
    case 5: return -0.0013;
    case 7: return -0.000067;
    default: return std::nullopt;
  }
}

/// M trend per family across ascending truncations.
inline LimitReport limit_report(std::span<const FunctionFamily> families,
                                std::span<const std::uint64_t> xs, unsigned s = 1,
                                unsigned precision = arith::kDefaultFloatDigits) {
  if (families.empty() || xs.empty())
    throw std::invalid_argument("limit_report: families and truncations must be nonempty");
  LimitReport report;
  for (const FunctionFamily& family : families) {
    std::optional<BigFloat> prev;
    for (std::uint64_t x : xs) {
      LimitRow row;
      row.family = family;
      row.x = x;
      row.m = m_value(family, x, s, precision).m;
      if (prev) row.delta_from_prev = BigFloat(row.m - *prev);
      row.conjectured_limit = conjectured_limit(family);
      prev = row.m;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

/// Full-precision decimal string for report columns.
inline std::string to_decimal_string(const BigFloat& v, unsigned precision) {
  return v.str(precision);
}

/// Report CSV: "family,p,x,s,precision,S,P,M" with full-precision strings.
inline void write_report_csv(std::ostream& out, std::span<const MSeriesResult> results) {
  out << "family,p,x,s,precision,S,P,M\n";
  for (const auto& r : results) {
    out << r.family.label() << ',';
    if (r.family.kind == FunctionFamily::Kind::PrimeShell) out << r.family.p;
    out << ',' << r.x << ',' << r.s << ',' << r.precision << ','
        << to_decimal_string(r.sum, r.precision) << ','
        << to_decimal_string(r.product, r.precision) << ','
        << to_decimal_string(r.m, r.precision) << '\n';
  }
}

}  // namespace shellprime::mseries
