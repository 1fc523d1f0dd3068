#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "shellprime/estimator.hpp"
#include "shellprime/reference.hpp"
#include "shellprime/shell.hpp"

using namespace shellprime;

namespace {

// Independent quadrature oracle: fixed-order Gauss-Kronrod at a 10x finer
// tolerance than whatever it is checking.
double li_oracle(double x, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double t) { return 1.0 / std::log(t); }, 2.0, x, 15, tol / 10.0);
}

double mi_oracle(std::uint32_t p, double x, double m, double tol) {
  const double inv_m = 1.0 / m;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [p, inv_m](double n) { return std::pow(estimator::shell_log(p, n), -inv_m); }, 2.0,
      x, 15, tol / 10.0);
}

}  // namespace

TEST_CASE("classic_pi counts primes exactly") {
  CHECK(estimator::classic_pi(2) == 1);
  CHECK(estimator::classic_pi(100) == 25);
  CHECK(estimator::classic_pi(200) == 46);
  CHECK(estimator::classic_pi(1000) == 168);
  CHECK_THROWS_AS(estimator::classic_pi(1), std::invalid_argument);
}

TEST_CASE("ls matches the tabulated logarithmic sums") {
  CHECK_THAT(estimator::ls(2), Catch::Matchers::WithinAbs(1.0 / std::log(2.0), 1e-14));
  CHECK_THAT(estimator::ls(100), Catch::Matchers::WithinAbs(29.99144, 1e-4));
  CHECK_THAT(estimator::ls(200), Catch::Matchers::WithinAbs(50.04329, 1e-4));
}

TEST_CASE("li agrees with an independent finer quadrature") {
  CHECK(estimator::li(2.0) == 0.0);
  for (double x : {10.0, 100.0, 200.0, 1e4}) {
    const double mine = estimator::li(x, 1e-12);
    const double oracle = li_oracle(x, 1e-12);
    CHECK_THAT(mine, Catch::Matchers::WithinAbs(oracle, 1e-9));
  }
  CHECK(estimator::li(200.0) > estimator::li(100.0));
  CHECK_THROWS_AS(estimator::li(1.5), std::invalid_argument);
}

TEST_CASE("riemann_r keeps the Mobius-weighted structure") {
  // Below 4 only the n = 1 term survives.
  CHECK_THAT(estimator::riemann_r(3.9), Catch::Matchers::WithinAbs(estimator::li(3.9), 1e-12));

  std::vector<estimator::RiemannTerm> terms;
  const double r100 = estimator::riemann_r(100.0, 1e-12, &terms);

  // Term list: n runs until 100^(1/n) < 2, i.e. n = 1..6, mu = 1,-1,-1,0,-1,1.
  REQUIRE(terms.size() == 6);
  const int expected_mu[] = {1, -1, -1, 0, -1, 1};
  for (std::size_t i = 0; i < terms.size(); ++i) {
    CHECK(terms[i].n == i + 1);
    CHECK(terms[i].mu == expected_mu[i]);
    CHECK(terms[i].root >= 2.0);
  }

  const double tol = 1e-12;
  const double composed = estimator::li(100.0, tol) - estimator::li(10.0, tol) / 2.0 -
                          estimator::li(std::pow(100.0, 1.0 / 3.0), tol) / 3.0 -
                          estimator::li(std::pow(100.0, 1.0 / 5.0), tol) / 5.0 +
                          estimator::li(std::pow(100.0, 1.0 / 6.0), tol) / 6.0;
  CHECK_THAT(r100, Catch::Matchers::WithinAbs(composed, 1e-10));

  // The corrected estimator lands nearer the true count than the plain sum.
  CHECK(std::abs(r100 - 25.0) < std::abs(estimator::ls(100) - 25.0));
}

TEST_CASE("shell_log matches the logarithm of the exact big integer") {
  for (std::uint32_t p : {2u, 3u, 13u, 61u}) {
    for (std::uint32_t n : {2u, 3u, 10u, 100u, 200u}) {
      arith::PrecisionGuard guard(40);
      arith::BigFloat exact = log(arith::BigFloat(shell::shell_value(n, p).value));
      const double direct = static_cast<double>(exact);
      const double fast = estimator::shell_log(p, static_cast<double>(n));
      CHECK_THAT(fast, Catch::Matchers::WithinRel(direct, 1e-12));
    }
  }
}

TEST_CASE("ms reproduces the reference sums at the empirical root") {
  CHECK_THAT(estimator::ms(2, 100, reference::kRootM),
             Catch::Matchers::WithinAbs(42.75969, 5e-5));
  CHECK_THAT(estimator::ms(13, 200, reference::kRootM),
             Catch::Matchers::WithinAbs(19.24779, 5e-5));
  CHECK_THAT(estimator::ms(2, 2, 1.0),
             Catch::Matchers::WithinAbs(1.0 / std::log(3.0), 1e-14));
}

TEST_CASE("mi stays within one unit of ms and grows with x") {
  CHECK(estimator::mi(2, 2.0, reference::kRootM) == 0.0);
  const double sum = estimator::ms(2, 100, reference::kRootM);
  const double integral = estimator::mi(2, 100.0, reference::kRootM);
  CHECK(std::abs(sum - integral) < 1.0);
  CHECK_THAT(integral, Catch::Matchers::WithinAbs(mi_oracle(2, 100.0, reference::kRootM, 1e-12), 1e-9));
  CHECK(estimator::mi(2, 150.0, reference::kRootM) > estimator::mi(2, 100.0, reference::kRootM));
}

TEST_CASE("the corrected estimate composes Mobius-weighted mi terms") {
  const double m = reference::kRootM;
  CHECK_THAT(estimator::riemann_corrected_estimate(2, 3.5, m),
             Catch::Matchers::WithinAbs(estimator::mi(2, 3.5, m), 1e-12));

  const double tol = 1e-12;
  const double expected = estimator::mi(2, 100.0, m, tol) -
                          estimator::mi(2, 10.0, m, tol) / 2.0 -
                          estimator::mi(2, std::pow(100.0, 1.0 / 3.0), m, tol) / 3.0 -
                          estimator::mi(2, std::pow(100.0, 1.0 / 5.0), m, tol) / 5.0 +
                          estimator::mi(2, std::pow(100.0, 1.0 / 6.0), m, tol) / 6.0;
  const double got = estimator::riemann_corrected_estimate(2, 100.0, m, tol);
  CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-10));
  CHECK(got < estimator::mi(2, 100.0, m, tol));  // first correction is negative
}

TEST_CASE("ls tracks li far more slowly than x grows") {
  for (double x : {100.0, 200.0}) {
    const double gap = std::abs(estimator::ls(static_cast<std::uint64_t>(x)) -
                                li_oracle(x, 1e-12));
    CHECK(gap < 2.0);        // the two stay within a constant-looking band
    CHECK(gap < 0.02 * x);   // and nowhere near linear growth
  }
}

TEST_CASE("per-term decay keeps higher-power curves below lower ones") {
  // Terms (ln f(n))^(-1/m) shrink as p grows for fixed n, so the row curves
  // flatten with p and never go negative.
  const double m = reference::kRootM;
  for (std::uint64_t n : {2ull, 10ull, 100ull}) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u}) {
      const double term = std::pow(estimator::shell_log(p, static_cast<double>(n)), -1.0 / m);
      CHECK(term > 0.0);
      CHECK(term < prev);
      prev = term;
    }
  }
  for (std::uint64_t x : {10ull, 100ull, 200ull}) {
    CHECK(estimator::ms(3, x, m) < estimator::ms(2, x, m));
    CHECK(estimator::ms(7, x, m) < estimator::ms(5, x, m));
  }
}

TEST_CASE("ms is strictly increasing in the root m") {
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    for (std::uint64_t x : {10ull, 50ull, 200ull}) {
      const double lower = estimator::ms(p, x, reference::kRootLower);
      const double mid = estimator::ms(p, x, reference::kRootM);
      const double upper = estimator::ms(p, x, reference::kRootUpper);
      CHECK(lower < mid);
      CHECK(mid < upper);
    }
  }
}

TEST_CASE("fit_root recovers a root that a bisection oracle agrees with") {
  // Single observation: the target is achievable, so the residual vanishes
  // at the root where ms(p, x, m) = count. Bisection on the monotone curve
  // provides the independent answer.
  const std::uint32_t p = 3;
  const std::uint64_t x = 100;
  const double target = estimator::ms(p, x, 1.7);  // guaranteed reachable

  double lo = 1.0, hi = 3.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (estimator::ms(p, x, mid) < target ? lo : hi) = mid;
  }
  const double oracle_m = 0.5 * (lo + hi);

  estimator::FitObservation obs[] = {{p, x, target}};
  auto fit = estimator::fit_root(obs);
  CHECK_THAT(fit.m, Catch::Matchers::WithinAbs(oracle_m, 2e-5));
  CHECK(fit.residual_sum_squares < 1e-8);
}

TEST_CASE("fit_root on the reference count column stays within the published bounds") {
  std::vector<estimator::FitObservation> obs;
  for (const auto& row : reference::kCountTable)
    obs.push_back({row.p, 100, static_cast<double>(row.pi_100)});
  auto fit = estimator::fit_root(obs);
  CHECK(fit.m >= reference::kRootLower);
  CHECK(fit.m <= reference::kRootUpper);
  WARN("fitted m = " << fit.m << ", distance from " << reference::kRootM << " = "
                     << std::abs(fit.m - reference::kRootM));
  CHECK_THROWS_AS(estimator::fit_root({}), std::invalid_argument);
}

TEST_CASE("nonconvergent quadrature reports the achieved error") {
  try {
    estimator::li(1e4, 1e-30);
    FAIL("expected QuadratureError");
  } catch (const estimator::QuadratureError& e) {
    CHECK(e.requested_tol == 1e-30);
    CHECK(e.achieved_error > 0.0);
  }
}

TEST_CASE("series CSV uses the pinned header and fixed decimals") {
  auto series = estimator::sample_ms(2, 5, reference::kRootM);
  REQUIRE(series.samples.size() == 4);
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    CHECK(series.samples[i].first > series.samples[i - 1].first);
    CHECK(series.samples[i].second >= 0.0);
  }

  std::ostringstream out;
  estimator::EstimateSeries all[] = {series, estimator::sample_ls(4)};
  estimator::write_series_csv(out, all);
  const std::string csv = out.str();
  CHECK(csv.rfind("kind,p,m,x,value\n", 0) == 0);
  CHECK(csv.find("Ms,2,1.6872300000,2,") != std::string::npos);
  CHECK(csv.find("Ls,,,2,1.4426950409\n") != std::string::npos);
}
