#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "shellprime/census.hpp"

using namespace shellprime;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("shellprime-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string grid_csv(const census::CensusGrid& grid) {
  std::ostringstream out;
  census::write_grid_csv(out, grid);
  return out.str();
}

}  // namespace

TEST_CASE("p=2 row is exactly the odd primes 2n-1") {
  census::GridConfig cfg;
  cfg.n_max = 10;
  cfg.powers = std::vector<std::uint32_t>{2};
  auto grid = census::scan_grid(cfg);
  CHECK(census::count_shell_primes(grid, 2) == 7);  // {3,5,7,11,13,17,19}

  cfg.n_max = 100;
  auto grid100 = census::scan_grid(cfg);
  // Sieve oracle: odd primes in [3, 199].
  std::size_t odd_primes = 0;
  for (std::uint32_t q : arith::primes_up_to(199))
    if (q >= 3) ++odd_primes;
  CHECK(census::count_shell_primes(grid100, 2) == odd_primes);
  CHECK(odd_primes == 45);

  for (const auto& rec : grid100.records()) {
    auto direct = arith::is_prime(arith::BigInt(2 * rec.n - 1));
    CHECK((rec.status == arith::Primality::Prime) == direct.is_prime());
  }
}

TEST_CASE("boundary convention drops the top base when exclusive") {
  census::GridConfig cfg;
  cfg.n_max = 100;
  cfg.powers = std::vector<std::uint32_t>{2};
  cfg.inclusive_upper = false;
  auto grid = census::scan_grid(cfg);
  CHECK(grid.bases().back() == 99);
  CHECK(census::count_shell_primes(grid, 2) == 44);  // 199 is prime and excluded
}

TEST_CASE("cells beyond the digit limit are unknown and uncounted") {
  census::GridConfig cfg;
  cfg.n_max = 50;
  cfg.powers = std::vector<std::uint32_t>{13};
  cfg.digit_limit = 12;
  census::ScanStats stats;
  auto grid = census::scan_grid(cfg, &stats);
  CHECK(stats.over_limit > 0);
  for (const auto& rec : grid.records()) {
    if (rec.digits > cfg.digit_limit)
      CHECK(rec.status == arith::Primality::UnknownOverLimit);
    else
      CHECK(rec.status != arith::Primality::UnknownOverLimit);
  }
  CHECK(grid.prime_count(13) + grid.unknown_count(13) <= grid.bases().size());
}

TEST_CASE("scan validates its configuration") {
  census::GridConfig cfg;
  cfg.n_min = 1;
  CHECK_THROWS_AS(census::scan_grid(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_max = 1;
  CHECK_THROWS_AS(census::scan_grid(cfg), std::invalid_argument);
  cfg = {};
  cfg.powers = std::vector<std::uint32_t>{4};  // not prime
  CHECK_THROWS_AS(census::scan_grid(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_min = 2;
  cfg.n_max = 2;
  cfg.inclusive_upper = false;  // empty base range
  CHECK_THROWS_AS(census::scan_grid(cfg), std::invalid_argument);
}

TEST_CASE("count_shell_primes rejects a row that was never scanned") {
  census::GridConfig cfg;
  cfg.n_max = 10;
  cfg.p_max = 7;
  auto grid = census::scan_grid(cfg);
  CHECK_THROWS_AS(census::count_shell_primes(grid, 11), std::out_of_range);
}

TEST_CASE("warm cache rescans run zero primality tests and reproduce the grid") {
  TempDir tmp;
  census::GridConfig cfg;
  cfg.n_max = 30;
  cfg.p_max = 11;
  cfg.cache_path = tmp.path / "cache.jsonl";

  census::ScanStats cold;
  auto first = census::scan_grid(cfg, &cold);
  CHECK(cold.cache_hits == 0);
  CHECK(cold.tested == cold.cells);

  census::ScanStats warm;
  auto second = census::scan_grid(cfg, &warm);
  CHECK(warm.cache_hits == warm.cells);
  CHECK(warm.tested == 0);
  CHECK(grid_csv(first) == grid_csv(second));
}

TEST_CASE("cache lines use the fixed key order") {
  TempDir tmp;
  census::GridConfig cfg;
  cfg.n_max = 2;
  cfg.powers = std::vector<std::uint32_t>{2};
  cfg.cache_path = tmp.path / "cache.jsonl";
  census::scan_grid(cfg);

  std::ifstream in(*cfg.cache_path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        R"({"n":2,"p":2,"digits":1,"status":"prime","method":"trial-division"})");
}

TEST_CASE("a torn final cache line is tolerated, a corrupt interior line is not") {
  TempDir tmp;
  const fs::path cache = tmp.path / "cache.jsonl";
  {
    std::ofstream out(cache);
    out << census::cache_line({2, 2, 1, arith::Primality::Prime, "trial-division"})
        << "\n";
    out << R"({"n":3,"p":2,"di)";  // torn mid-write
  }
  auto loaded = census::load_cache(cache);
  CHECK(loaded.size() == 1);

  {
    std::ofstream out(cache);
    out << "not json at all\n";
    out << census::cache_line({2, 2, 1, arith::Primality::Prime, "trial-division"})
        << "\n";
  }
  CHECK_THROWS_AS(census::load_cache(cache), census::CacheError);
}

TEST_CASE("scans are deterministic across worker counts") {
  census::GridConfig cfg;
  cfg.n_max = 40;
  cfg.p_max = 13;
  cfg.workers = 1;
  auto serial = census::scan_grid(cfg);
  cfg.workers = 4;
  auto parallel = census::scan_grid(cfg);
  CHECK(grid_csv(serial) == grid_csv(parallel));
}

TEST_CASE("grid CSV export is sorted with the pinned header") {
  census::GridConfig cfg;
  cfg.n_max = 4;
  cfg.p_max = 3;
  auto grid = census::scan_grid(cfg);
  std::string csv = grid_csv(grid);
  CHECK(csv.rfind("p,n,digits,status\n", 0) == 0);
  CHECK(csv.find("2,2,1,prime") != std::string::npos);
  CHECK(csv.find("3,2,1,prime") != std::string::npos);  // 7 is one digit
}

TEST_CASE("base sequences reproduce the catalogued small entries") {
  auto s166 = census::base_sequence(166, 61);
  REQUIRE(s166.size() == 3);
  CHECK(s166[0].first == 2);
  CHECK(s166[0].second.value == 331);
  CHECK(s166[1].first == 3);
  CHECK(s166[1].second.value == 82171);
  CHECK(s166[2].first == 5);
  CHECK(s166[2].second.value == arith::BigInt("3751197451"));

  auto s141 = census::base_sequence(141, 61);
  REQUIRE(s141.size() == 3);
  CHECK(s141[0].first == 2);
  CHECK(s141[1].first == 3);
  CHECK(s141[2].first == 13);
  CHECK(s141[2].second.value == arith::BigInt("769449701919846533025514621"));

  auto s173 = census::base_sequence(173, 61);
  REQUIRE(s173.size() == 3);
  CHECK(s173[0].first == 3);
  CHECK(s173[0].second.value == 89269);
  CHECK(s173[1].first == 7);
  CHECK(s173[1].second.value == arith::BigInt("184438202074309"));
  CHECK(s173[2].first == 43);
  CHECK(s173[2].second.value.str().substr(0, 35) == "37988946604016968734924614832155863");
}

TEST_CASE("ending digit histograms respect the last-digit law") {
  census::GridConfig cfg;
  cfg.n_max = 60;
  cfg.p_max = 13;
  auto grid = census::scan_grid(cfg);

  auto all = census::ending_digit_histogram(grid);
  std::size_t total = 0;
  for (auto [digit, count] : all) total += count;
  std::size_t prime_cells = 0;
  for (const auto& rec : grid.records())
    prime_cells += rec.status == arith::Primality::Prime;
  CHECK(total == prime_cells);

  // Sieve oracle for the p=2 row: odd primes 2n-1 end in 1, 3, 7, or 9,
  // except the single prime 5 itself (any later value ending in 5 is
  // divisible by 5).
  auto row2 = census::row_digit_histogram(grid, 2);
  for (auto [digit, count] : row2)
    CHECK((digit == 1 || digit == 3 || digit == 5 || digit == 7 || digit == 9));
  CHECK(row2.at(5) == 1);
  CHECK(row2.at(3) >= 1);  // 3, 13, 23, ...

  for (std::uint32_t p : grid.powers()) {
    if (p == 2) continue;
    auto row = census::row_digit_histogram(grid, p);
    CHECK(row.count(3) == 0);
    for (auto [digit, count] : row) CHECK((digit == 1 || digit == 7 || digit == 9));
  }
}

TEST_CASE("an empty grid yields an empty histogram and rejects every row") {
  census::CensusGrid empty({}, {}, {});
  CHECK(census::ending_digit_histogram(empty).empty());
  CHECK_THROWS_AS(census::count_shell_primes(empty, 2), std::out_of_range);
}

TEST_CASE("full x=100 row counts match an independent census oracle") {
  // Frozen from an independent arbitrary-precision census (BPSW-based, with
  // the p=5 row additionally proven by exhaustive trial division). Inclusive
  // bases [2, 100], 128-digit limit.
  const std::map<std::uint32_t, std::size_t> expected = {
      {2, 45}, {3, 42}, {5, 25}, {7, 24},  {11, 9}, {13, 8},
      {17, 11}, {19, 11}, {23, 5}, {29, 8}, {31, 10}, {37, 3},
      {41, 6}, {43, 7}, {47, 5}, {53, 2}, {59, 5}, {61, 7}};

  census::GridConfig cfg;
  cfg.n_max = 100;
  std::vector<std::uint32_t> powers;
  for (auto [p, count] : expected) powers.push_back(p);
  cfg.powers = powers;
  auto grid = census::scan_grid(cfg);
  for (auto [p, count] : expected) {
    CAPTURE(p);
    CHECK(census::count_shell_primes(grid, p) == count);
  }
}
