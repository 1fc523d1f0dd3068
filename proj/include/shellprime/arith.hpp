#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace shellprime::arith {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

/// Arbitrary-precision decimal value. Precision (in significant decimal
/// digits) travels with each value; fresh values pick up the thread's
/// working precision, and binary operations keep the wider operand's.
using BigFloat = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultFloatDigits = 60;
inline constexpr unsigned kDefaultDigitLimit = 128;

/// Scoped working precision for BigFloat, in decimal digits.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits10)
      : saved_(BigFloat::default_precision()) {
    BigFloat::default_precision(digits10);
  }
  ~PrecisionGuard() { BigFloat::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

/// Number of decimal digits in |v| (1 for zero).
inline unsigned digit_count(const BigInt& v) {
  // mpz_sizeinbase may overestimate by one for base 10; fix up exactly.
  const mpz_srcptr z = v.backend().data();
  std::size_t d = mpz_sizeinbase(z, 10);
  if (d <= 1) return 1;
  BigInt bound = pow(BigInt(10), static_cast<unsigned>(d - 1));
  if (abs(v) < bound) --d;
  return static_cast<unsigned>(d);
}

inline int last_decimal_digit(const BigInt& v) {
  return static_cast<int>(mpz_fdiv_ui(v.backend().data(), 10));
}

/// Primes <= limit, ascending (sieve of Eratosthenes).
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= limit; j += i)
      composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

inline bool is_small_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Smallest prime factor of n >= 2.
inline std::uint32_t smallest_factor(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("smallest_factor: n must be >= 2");
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return d;
  return n;
}

enum class Primality { Prime, Composite, UnknownOverLimit };

inline std::string_view to_string(Primality s) {
  switch (s) {
    case Primality::Prime: return "prime";
    case Primality::Composite: return "composite";
    case Primality::UnknownOverLimit: return "unknown";
  }
  return "unknown";
}

struct PrimalityVerdict {
  Primality status = Primality::UnknownOverLimit;
  std::string method;             // "trivial", "trial-division", "deterministic-mr", "bpsw+mr", "digit-limit"
  std::optional<BigInt> divisor;  // nontrivial divisor, when compositeness was found by division
  std::string note;               // e.g. which probabilistic stage failed

  bool is_prime() const { return status == Primality::Prime; }
};

namespace detail {

// Miller-Rabin with the fixed 13-prime base set is deterministic below this.
inline const BigInt& deterministic_mr_bound() {
  static const BigInt bound("3317044064679887385961981");
  return bound;
}

inline const std::vector<std::uint32_t>& trial_primes() {
  static const std::vector<std::uint32_t> primes = primes_up_to(1000);
  return primes;
}

/// One strong-probable-prime round. n odd >= 5, n - 1 = odd_part * 2^two_exp.
inline bool strong_probable_prime(const BigInt& n, const BigInt& n_minus_1,
                                  const BigInt& odd_part, unsigned two_exp,
                                  const BigInt& base) {
  BigInt a = base % n;
  if (a == 0) return true;  // base shares all of n; uninformative round
  BigInt x = powm(a, odd_part, n);
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned i = 1; i < two_exp; ++i) {
    x = (x * x) % n;
    if (x == n_minus_1) return true;
  }
  return false;
}

inline int jacobi_symbol(const BigInt& a, const BigInt& n) {
  return mpz_jacobi(a.backend().data(), n.backend().data());
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice
/// (P = 1, Q = (1 - D) / 4 for the first D in 5, -7, 9, -11, ... with
/// Jacobi(D, n) = -1). Caller guarantees n odd, n >= 5, not a square.
inline bool strong_lucas_probable_prime(const BigInt& n) {
  BigInt d_candidate = 5;
  while (true) {
    int j = jacobi_symbol(d_candidate, n);
    if (j == 0) return abs(d_candidate) == n;  // shared factor below n => composite
    if (j == -1) break;
    d_candidate = d_candidate > 0 ? BigInt(-(d_candidate + 2)) : BigInt(-(d_candidate - 2));
  }
  const BigInt discriminant = d_candidate;
  const BigInt q = (1 - discriminant) / 4;

  BigInt d = n + 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }

  const auto half_mod = [&n](BigInt v) {
    v %= n;
    if (v < 0) v += n;
    if ((v & 1) != 0) v += n;
    v >>= 1;
    return v % n;
  };

  // Left-to-right binary chain for U_d, V_d, Q^d (mod n); P = 1.
  BigInt u = 1, v = 1, qk = q % n;
  if (qk < 0) qk += n;
  const unsigned bits = static_cast<unsigned>(msb(d));
  for (int i = static_cast<int>(bits) - 1; i >= 0; --i) {
    u = (u * v) % n;
    v = (v * v - 2 * qk) % n;
    if (v < 0) v += n;
    qk = (qk * qk) % n;
    if (bit_test(d, static_cast<unsigned>(i))) {
      BigInt u_next = half_mod(u + v);
      v = half_mod(discriminant * u + v);
      u = u_next;
      qk = (qk * q) % n;
      if (qk < 0) qk += n;
    }
  }

  if (u == 0 || v == 0) return true;
  for (unsigned r = 1; r < s; ++r) {
    v = (v * v - 2 * qk) % n;
    if (v < 0) v += n;
    if (v == 0) return true;
    qk = (qk * qk) % n;
  }
  return false;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

/// Uniform-ish base in [2, n-2], derived deterministically from the RNG so
/// that verdicts do not depend on scheduling or process state.
inline BigInt random_base(SplitMix64& rng, const BigInt& n) {
  const unsigned chunks = static_cast<unsigned>(msb(n) / 64 + 2);
  BigInt r = 0;
  for (unsigned i = 0; i < chunks; ++i) {
    r <<= 64;
    r |= BigInt(rng.next());
  }
  return 2 + r % (n - 3);
}

}  // namespace detail

/// Primality verdict for v >= 0 under a decimal-digit ceiling.
///
/// Values under the 13-base deterministic Miller-Rabin bound get an exact
/// answer. Larger values get Baillie-PSW plus 64 extra strong-probable-prime
/// rounds (combined false-positive odds below 2^-128). Values longer than
/// digit_limit digits are not tested at all.
inline PrimalityVerdict is_prime(const BigInt& v,
                                 unsigned digit_limit = kDefaultDigitLimit) {
  if (v < 0) throw std::invalid_argument("is_prime: negative input");

  const unsigned digits = digit_count(v);
  if (digits > digit_limit) {
    return {Primality::UnknownOverLimit, "digit-limit", std::nullopt,
            "value exceeds " + std::to_string(digit_limit) + " digits"};
  }
  if (v < 2) return {Primality::Composite, "trivial", std::nullopt, "unit or zero"};
  if (v < 4) return {Primality::Prime, "trial-division", std::nullopt, ""};

  for (std::uint32_t p : detail::trial_primes()) {
    if (v == p) return {Primality::Prime, "trial-division", std::nullopt, ""};
    if (mpz_divisible_ui_p(v.backend().data(), p))
      return {Primality::Composite, "trial-division", BigInt(p), ""};
    if (BigInt(p) * p > v) return {Primality::Prime, "trial-division", std::nullopt, ""};
  }
  // No factor below 1000; v > 10^6 from here on.

  const BigInt n_minus_1 = v - 1;
  BigInt odd_part = n_minus_1;
  unsigned two_exp = 0;
  while ((odd_part & 1) == 0) {
    odd_part >>= 1;
    ++two_exp;
  }

  if (v < detail::deterministic_mr_bound()) {
    static const std::uint32_t bases[] = {2,  3,  5,  7,  11, 13, 17,
                                          19, 23, 29, 31, 37, 41};
    for (std::uint32_t b : bases) {
      if (!detail::strong_probable_prime(v, n_minus_1, odd_part, two_exp, BigInt(b)))
        return {Primality::Composite, "deterministic-mr", std::nullopt,
                "strong test failed for base " + std::to_string(b)};
    }
    return {Primality::Prime, "deterministic-mr", std::nullopt, ""};
  }

  if (!detail::strong_probable_prime(v, n_minus_1, odd_part, two_exp, BigInt(2)))
    return {Primality::Composite, "bpsw+mr", std::nullopt,
            "strong test failed for base 2"};
  if (mpz_perfect_square_p(v.backend().data()))
    return {Primality::Composite, "bpsw+mr", std::nullopt, "perfect square"};
  if (!detail::strong_lucas_probable_prime(v))
    return {Primality::Composite, "bpsw+mr", std::nullopt, "strong Lucas test failed"};

  detail::SplitMix64 rng{detail::fnv1a(v.str())};
  for (unsigned round = 0; round < 64; ++round) {
    BigInt base = detail::random_base(rng, v);
    if (!detail::strong_probable_prime(v, n_minus_1, odd_part, two_exp, base))
      return {Primality::Composite, "bpsw+mr", std::nullopt,
              "strong test failed in round " + std::to_string(round)};
  }
  return {Primality::Prime, "bpsw+mr", std::nullopt, ""};
}

/// Mobius function via trial-division factorization.
inline int mobius(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("mobius: argument must be positive");
  int factors = 0;
  for (std::uint64_t d = 2; d * d <= k; ++d) {
    if (k % d != 0) continue;
    k /= d;
    if (k % d == 0) return 0;  // square factor
    ++factors;
  }
  if (k > 1) ++factors;
  return (factors % 2 == 0) ? 1 : -1;
}

/// Exact binomial coefficient C(a, k).
inline BigInt binomial(std::uint64_t a, std::uint64_t k) {
  if (k > a) throw std::invalid_argument("binomial: k must not exceed a");
  BigInt r;
  mpz_bin_uiui(r.backend().data(), a, static_cast<unsigned long>(k));
  return r;
}

}  // namespace shellprime::arith
