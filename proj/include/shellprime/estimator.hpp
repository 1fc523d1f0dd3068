#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellprime/arith.hpp"

namespace shellprime::estimator {

struct EstimatorConfig {
  double root_m = 1.68723;   // empirical root applied inside Ms/Mi
  double quad_tol = 1e-12;
  double series_cutoff = 2.0;  // Mobius sums stop once x^(1/n) falls below this
};

inline constexpr double kRootM = 1.68723;
inline constexpr double kRootUpper = 2.00000;
inline constexpr double kRootLower = 1.35759;

/// Exact prime count via sieve.
inline std::uint64_t classic_pi(std::uint64_t x) {
  if (x < 2) throw std::invalid_argument("classic_pi: x must be >= 2");
  if (x > 100'000'000) throw std::invalid_argument("classic_pi: x too large for the sieve");
  return arith::primes_up_to(static_cast<std::uint32_t>(x)).size();
}

/// Logarithmic sum: 1/ln 2 + 1/ln 3 + ... + 1/ln x.
inline double ls(std::uint64_t x) {
  if (x < 2) throw std::invalid_argument("ls: x must be >= 2");
  double sum = 0.0, carry = 0.0;  // Kahan
  for (std::uint64_t k = 2; k <= x; ++k) {
    const double term = 1.0 / std::log(static_cast<double>(k)) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

struct QuadratureError : std::runtime_error {
  QuadratureError(double requested, double achieved)
      : std::runtime_error("quadrature did not reach tolerance " +
                           std::to_string(requested) + " (achieved ~" +
                           std::to_string(achieved) + ")"),
        requested_tol(requested),
        achieved_error(achieved) {}
  double requested_tol;
  double achieved_error;
};

namespace detail {

struct QuadState {
  double error = 0.0;
  bool converged = true;
};

template <class F>
double adaptive_simpson(const F& f, double a, double m, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth, QuadState& state) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    state.converged = false;
    state.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) {
    state.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, state) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, state);
}

/// Adaptive Simpson quadrature to an absolute tolerance. Throws
/// QuadratureError (with the achieved error estimate) on nonconvergence.
template <class F>
double integrate(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  QuadState state;
  const double value = adaptive_simpson(f, a, m, b, fa, fm, fb, whole, tol, 48, state);
  if (!state.converged) throw QuadratureError(tol, state.error);
  return value;
}

}  // namespace detail

/// Li(x) = integral of 1/ln t over [2, x].
inline double li(double x, double tol = 1e-12) {
  if (x < 2.0) throw std::invalid_argument("li: x must be >= 2");
  return detail::integrate([](double t) { return 1.0 / std::log(t); }, 2.0, x, tol);
}

struct RiemannTerm {
  unsigned n = 0;
  int mu = 0;
  double root = 0.0;      // x^(1/n)
  double li_value = 0.0;  // Li(root), evaluated only when mu != 0
};

/// R(x): Mobius-weighted sum of Li(x^(1/n)), truncated at the first n with
/// x^(1/n) below the cutoff (Li's lower limit).
inline double riemann_r(double x, double tol = 1e-12,
                        std::vector<RiemannTerm>* terms = nullptr,
                        double cutoff = 2.0) {
  if (x < 2.0) throw std::invalid_argument("riemann_r: x must be >= 2");
  double sum = 0.0;
  for (unsigned n = 1;; ++n) {
    const double root = std::pow(x, 1.0 / n);
    if (root < cutoff) break;
    RiemannTerm term{n, arith::mobius(n), root, 0.0};
    if (term.mu != 0) {
      term.li_value = li(root, tol);
      sum += static_cast<double>(term.mu) / n * term.li_value;
    }
    if (terms) terms->push_back(term);
  }
  return sum;
}

/// ln f(n) for f(n) = n^p - (n-1)^p, evaluated without forming f:
/// p ln n + ln(1 - ((n-1)/n)^p). Valid for real n >= 2.
inline double shell_log(std::uint32_t p, double n) {
  return p * std::log(n) + std::log1p(-std::pow((n - 1.0) / n, static_cast<double>(p)));
}

/// Ms(x) = sum over n = 2..x of (ln f(n))^(-1/m).
inline double ms(std::uint32_t p, std::uint64_t x, double m) {
  if (p < 2) throw std::invalid_argument("ms: power must be >= 2");
  if (x < 2) throw std::invalid_argument("ms: x must be >= 2");
  if (m <= 0) throw std::invalid_argument("ms: root must be positive");
  const double inv_m = 1.0 / m;
  double sum = 0.0, carry = 0.0;
  for (std::uint64_t n = 2; n <= x; ++n) {
    const double term =
        std::pow(shell_log(p, static_cast<double>(n)), -inv_m) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

/// Mi(x) = integral over real n in [2, x] of (ln f(n))^(-1/m), with f
/// extended to real n by the same closed form.
inline double mi(std::uint32_t p, double x, double m, double tol = 1e-12) {
  if (p < 2) throw std::invalid_argument("mi: power must be >= 2");
  if (x < 2.0) throw std::invalid_argument("mi: x must be >= 2");
  if (m <= 0) throw std::invalid_argument("mi: root must be positive");
  const double inv_m = 1.0 / m;
  return detail::integrate(
      [p, inv_m](double n) { return std::pow(shell_log(p, n), -inv_m); }, 2.0, x, tol);
}

/// Mobius-corrected Mi, mirroring the R(x) correction of Li:
/// Mi(x) - Mi(sqrt x)/2 - Mi(cbrt x)/3 - Mi(x^(1/5))/5 + Mi(x^(1/6))/6 - ...
inline double riemann_corrected_estimate(std::uint32_t p, double x, double m,
                                         double tol = 1e-12, double cutoff = 2.0) {
  if (x < 2.0) throw std::invalid_argument("riemann_corrected_estimate: x must be >= 2");
  double sum = 0.0;
  for (unsigned n = 1;; ++n) {
    const double root = std::pow(x, 1.0 / n);
    if (root < cutoff) break;
    const int mu = arith::mobius(n);
    if (mu != 0) sum += static_cast<double>(mu) / n * mi(p, root, m, tol);
  }
  return sum;
}

struct FitObservation {
  std::uint32_t p = 0;
  std::uint64_t x = 0;
  double count = 0.0;  // observed shell-prime count at (p, x)
};

struct FitResult {
  double m = 0.0;
  double residual_sum_squares = 0.0;
};

/// Least-squares fit of the root m: minimizes sum over observations of
/// (Ms(p, x, m) - count)^2 by golden-section search to 1e-5.
inline FitResult fit_root(std::span<const FitObservation> observations, double lo = 1.0,
                          double hi = 3.0) {
  if (observations.empty()) throw std::invalid_argument("fit_root: no observations");
  if (!(lo > 0.0) || hi <= lo) throw std::invalid_argument("fit_root: bad search range");

  // The logs don't depend on m; precompute them once per observation.
  std::vector<std::pair<std::vector<double>, double>> prepared;
  prepared.reserve(observations.size());
  for (const auto& obs : observations) {
    std::vector<double> logs;
    logs.reserve(obs.x - 1);
    for (std::uint64_t n = 2; n <= obs.x; ++n)
      logs.push_back(shell_log(obs.p, static_cast<double>(n)));
    prepared.emplace_back(std::move(logs), obs.count);
  }
  const auto objective = [&prepared](double m) {
    const double inv_m = 1.0 / m;
    double sse = 0.0;
    for (const auto& [logs, count] : prepared) {
      double sum = 0.0;
      for (double l : logs) sum += std::pow(l, -inv_m);
      const double r = sum - count;
      sse += r * r;
    }
    return sse;
  };

  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-5) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = objective(d);
    }
  }
  const double best = 0.5 * (a + b);
  return {best, objective(best)};
}

enum class EstimatorKind { Ls, Li, R, Ms, Mi, RiemannCorrectedPi };

inline std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Ls: return "Ls";
    case EstimatorKind::Li: return "Li";
    case EstimatorKind::R: return "R";
    case EstimatorKind::Ms: return "Ms";
    case EstimatorKind::Mi: return "Mi";
    case EstimatorKind::RiemannCorrectedPi: return "RiemannCorrectedPi";
  }
  return "?";
}

/// A sampled estimator curve at integer x.
struct EstimateSeries {
  EstimatorKind kind = EstimatorKind::Ls;
  std::optional<std::uint32_t> p;  // shell power, for Ms/Mi/corrected
  std::optional<double> m;
  double tol = 1e-12;
  std::vector<std::pair<std::uint64_t, double>> samples;  // ascending x
};

inline EstimateSeries sample_ms(std::uint32_t p, std::uint64_t x_max, double m) {
  EstimateSeries s{EstimatorKind::Ms, p, m, 0.0, {}};
  const double inv_m = 1.0 / m;
  double sum = 0.0;
  for (std::uint64_t n = 2; n <= x_max; ++n) {
    sum += std::pow(shell_log(p, static_cast<double>(n)), -inv_m);
    s.samples.emplace_back(n, sum);
  }
  return s;
}

inline EstimateSeries sample_ls(std::uint64_t x_max) {
  EstimateSeries s{EstimatorKind::Ls, std::nullopt, std::nullopt, 0.0, {}};
  double sum = 0.0;
  for (std::uint64_t k = 2; k <= x_max; ++k) {
    sum += 1.0 / std::log(static_cast<double>(k));
    s.samples.emplace_back(k, sum);
  }
  return s;
}

inline EstimateSeries sample_li(std::uint64_t x_max, double tol = 1e-12) {
  EstimateSeries s{EstimatorKind::Li, std::nullopt, std::nullopt, tol, {}};
  for (std::uint64_t k = 2; k <= x_max; ++k)
    s.samples.emplace_back(k, li(static_cast<double>(k), tol));
  return s;
}

inline EstimateSeries sample_r(std::uint64_t x_max, double tol = 1e-12) {
  EstimateSeries s{EstimatorKind::R, std::nullopt, std::nullopt, tol, {}};
  for (std::uint64_t k = 2; k <= x_max; ++k)
    s.samples.emplace_back(k, riemann_r(static_cast<double>(k), tol));
  return s;
}

inline EstimateSeries sample_mi(std::uint32_t p, std::uint64_t x_max, double m,
                                double tol = 1e-12) {
  EstimateSeries s{EstimatorKind::Mi, p, m, tol, {}};
  for (std::uint64_t k = 2; k <= x_max; ++k)
    s.samples.emplace_back(k, mi(p, static_cast<double>(k), m, tol));
  return s;
}

/// Fixed-decimal formatting used by every curve export.
inline std::string format_real(double v, int decimals = 10) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

/// Curve CSV: "kind,p,m,x,value". p and m are blank where not applicable;
/// values carry fixed 10-decimal formatting.
inline void write_series_csv(std::ostream& out, std::span<const EstimateSeries> series) {
  out << "kind,p,m,x,value\n";
  for (const auto& s : series) {
    const std::string kind = to_string(s.kind);
    for (const auto& [x, v] : s.samples) {
      out << kind << ',';
      if (s.p) out << *s.p;
      out << ',';
      if (s.m) out << format_real(*s.m);
      out << ',' << x << ',' << format_real(v) << '\n';
    }
  }
}

}  // namespace shellprime::estimator
