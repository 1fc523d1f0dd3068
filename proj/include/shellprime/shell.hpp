#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shellprime/arith.hpp"

namespace shellprime::shell {

using arith::BigInt;

/// One cell of the shell grid: n^a - (n-1)^a with its decimal footprint.
struct ShellValue {
  std::uint32_t base = 0;   // n
  std::uint32_t power = 0;  // a
  BigInt value;
  unsigned digit_count = 0;
  int last_digit = 0;
};

inline ShellValue shell_value(std::uint32_t n, std::uint32_t a) {
  if (n < 2) throw std::invalid_argument("shell_value: base must be >= 2");
  if (a < 2) throw std::invalid_argument("shell_value: power must be >= 2");
  BigInt v = pow(BigInt(n), a) - pow(BigInt(n - 1), a);
  unsigned digits = arith::digit_count(v);
  int last = arith::last_decimal_digit(v);
  return {n, a, std::move(v), digits, last};
}

/// Binomial expansion of n^a - (n-1)^a as a polynomial in n:
/// sum over k = 1..a of c_k * n^(a-k), with c_k = (-1)^(k+1) * C(a, k).
struct ShellExpansion {
  std::uint32_t power = 0;
  std::vector<BigInt> coefficients;  // c_1 .. c_a
  bool power_is_prime = false;

  BigInt evaluate(const BigInt& n) const {
    BigInt acc = 0;
    for (const BigInt& c : coefficients) acc = acc * n + c;  // Horner, constant term last
    return acc;
  }
};

inline ShellExpansion expansion(std::uint32_t a) {
  if (a < 2) throw std::invalid_argument("expansion: power must be >= 2");
  ShellExpansion e;
  e.power = a;
  e.power_is_prime = arith::is_small_prime(a);
  e.coefficients.reserve(a);
  for (std::uint32_t k = 1; k <= a; ++k) {
    BigInt c = arith::binomial(a, k);
    if (k % 2 == 0) c = -c;
    e.coefficients.push_back(std::move(c));
  }
  return e;
}

namespace detail {

/// Final digit of d^a. Final digits of powers repeat with period 4, so the
/// exponent is reduced mod 4 with 0 mapped back to 4.
inline int pow_last_digit(int d, std::uint32_t a) {
  unsigned e = a % 4;
  if (e == 0) e = 4;
  int r = 1;
  for (unsigned i = 0; i < e; ++i) r = (r * d) % 10;
  return r;
}

}  // namespace detail

/// Last decimal digit of n^a - (n-1)^a from the residue of n alone.
inline int last_digit(int n_mod_10, std::uint32_t a) {
  if (n_mod_10 < 0 || n_mod_10 > 9)
    throw std::invalid_argument("last_digit: residue must be in [0, 9]");
  if (a < 2) throw std::invalid_argument("last_digit: power must be >= 2");
  int lhs = detail::pow_last_digit(n_mod_10, a);
  int rhs = detail::pow_last_digit((n_mod_10 + 9) % 10, a);
  return (lhs - rhs + 10) % 10;
}

/// Last-digit matrix for powers a = 2.. and bases n = 2.., with the repeat
/// structure of the pattern. Periods are detected over full residue classes
/// (the digit depends only on n mod 10 and a mod 4), so they do not depend
/// on the requested window size.
struct DigitPatternTable {
  std::vector<std::uint32_t> powers;  // row labels, a ascending from 2
  std::vector<std::uint32_t> bases;   // column labels, n ascending from 2
  std::vector<std::vector<int>> digits;
  unsigned horizontal_period = 10;  // divides 10
  unsigned vertical_period = 4;     // divides 4
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells_equal_three;  // (a, n)
  std::vector<unsigned> row_period_sums;  // per row, digits summed over one horizontal period
};

inline DigitPatternTable digit_pattern_table(std::uint32_t n_count, std::uint32_t a_count) {
  if (n_count < 1 || a_count < 1)
    throw std::invalid_argument("digit_pattern_table: counts must be >= 1");
  DigitPatternTable t;
  t.powers.resize(a_count);
  t.bases.resize(n_count);
  for (std::uint32_t i = 0; i < a_count; ++i) t.powers[i] = 2 + i;
  for (std::uint32_t j = 0; j < n_count; ++j) t.bases[j] = 2 + j;

  t.digits.assign(a_count, std::vector<int>(n_count, 0));
  for (std::uint32_t i = 0; i < a_count; ++i) {
    for (std::uint32_t j = 0; j < n_count; ++j) {
      int d = last_digit(static_cast<int>(t.bases[j] % 10), t.powers[i]);
      t.digits[i][j] = d;
      if (d == 3) t.cells_equal_three.emplace_back(t.powers[i], t.bases[j]);
    }
  }

  const auto rows_repeat_horizontally = [&](unsigned h) {
    for (std::uint32_t a : t.powers)
      for (int r = 0; r < 10; ++r)
        if (last_digit(r, a) != last_digit(static_cast<int>((r + h) % 10), a)) return false;
    return true;
  };
  for (unsigned h : {1u, 2u, 5u, 10u}) {
    if (rows_repeat_horizontally(h)) {
      t.horizontal_period = h;
      break;
    }
  }

  const auto rows_repeat_vertically = [&](unsigned v) {
    for (std::uint32_t a : t.powers)
      for (int r = 0; r < 10; ++r)
        if (last_digit(r, a) != last_digit(r, a + v)) return false;
    return true;
  };
  for (unsigned v : {1u, 2u, 4u}) {
    if (rows_repeat_vertically(v)) {
      t.vertical_period = v;
      break;
    }
  }

  t.row_period_sums.reserve(a_count);
  for (std::uint32_t a : t.powers) {
    unsigned sum = 0;
    for (unsigned j = 0; j < t.horizontal_period; ++j)
      sum += static_cast<unsigned>(last_digit(static_cast<int>((2 + j) % 10), a));
    t.row_period_sums.push_back(sum);
  }
  return t;
}

/// Constructive non-primality witness for a composite power c: with d the
/// smallest proper divisor of c, n^d - (n-1)^d divides n^c - (n-1)^c.
struct CompositePowerWitness {
  std::uint32_t base = 0;           // n
  std::uint32_t power = 0;          // c, composite
  std::uint32_t divisor_power = 0;  // d, smallest proper divisor of c
  BigInt divisor_value;             // n^d - (n-1)^d
  BigInt quotient;                  // (n^c - (n-1)^c) / divisor_value
};

inline CompositePowerWitness composite_power_witness(std::uint32_t n, std::uint32_t c) {
  if (n < 2) throw std::invalid_argument("composite_power_witness: base must be >= 2");
  if (c < 4 || arith::is_small_prime(c))
    throw std::invalid_argument("composite_power_witness: power must be composite");

  const std::uint32_t d = arith::smallest_factor(c);
  BigInt divisor = shell_value(n, d).value;
  BigInt whole = shell_value(n, c).value;
  BigInt quotient, remainder;
  divide_qr(whole, divisor, quotient, remainder);
  if (remainder != 0)
    throw std::logic_error("composite_power_witness: algebraic divisor failed to divide");
  return {n, c, d, std::move(divisor), std::move(quotient)};
}

}  // namespace shellprime::shell
