#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "shellprime/arith.hpp"
#include "shellprime/shell.hpp"

namespace shellprime::census {

using arith::BigInt;
using arith::Primality;

struct GridConfig {
  std::uint32_t n_min = 2;
  std::uint32_t n_max = 100;
  std::uint32_t p_max = 100;  // rows are the primes <= p_max
  unsigned digit_limit = arith::kDefaultDigitLimit;
  bool inclusive_upper = true;  // false: stop one base short of n_max
  std::optional<std::filesystem::path> cache_path;
  unsigned workers = 0;  // 0 = logical cores
  std::optional<std::vector<std::uint32_t>> powers;  // explicit row set (primes), overrides p_max
};

struct PrimalityRecord {
  std::uint32_t n = 0;
  std::uint32_t p = 0;
  unsigned digits = 0;
  Primality status = Primality::UnknownOverLimit;
  std::string method;
};

struct ScanStats {
  std::size_t cells = 0;
  std::size_t cache_hits = 0;
  std::size_t tested = 0;      // fresh primality tests actually run
  std::size_t over_limit = 0;
};

struct CacheError : std::runtime_error {
  explicit CacheError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error("census cache " + path.string() + ": " + what) {}
};

/// The scanned grid: prime powers as rows, bases as columns, one immutable
/// record per cell, with per-row tallies of prime and untestable cells.
class CensusGrid {
 public:
  CensusGrid(std::vector<std::uint32_t> powers, std::vector<std::uint32_t> bases,
             std::vector<PrimalityRecord> records)
      : powers_(std::move(powers)), bases_(std::move(bases)), records_(std::move(records)) {
    for (std::size_t i = 0; i < powers_.size(); ++i) row_index_[powers_[i]] = i;
    prime_counts_.assign(powers_.size(), 0);
    unknown_counts_.assign(powers_.size(), 0);
    for (const auto& rec : records_) {
      const std::size_t row = row_index_.at(rec.p);
      if (rec.status == Primality::Prime) ++prime_counts_[row];
      if (rec.status == Primality::UnknownOverLimit) ++unknown_counts_[row];
    }
  }

  const std::vector<std::uint32_t>& powers() const { return powers_; }
  const std::vector<std::uint32_t>& bases() const { return bases_; }
  const std::vector<PrimalityRecord>& records() const { return records_; }

  bool has_row(std::uint32_t p) const { return row_index_.count(p) != 0; }

  const PrimalityRecord& record(std::uint32_t n, std::uint32_t p) const {
    const std::size_t row = row_of(p);
    if (n < bases_.front() || n > bases_.back())
      throw std::out_of_range("census: base " + std::to_string(n) + " not in grid");
    return records_[row * bases_.size() + (n - bases_.front())];
  }

  std::size_t prime_count(std::uint32_t p) const { return prime_counts_[row_of(p)]; }
  std::size_t unknown_count(std::uint32_t p) const { return unknown_counts_[row_of(p)]; }

  /// Prime count over a sub-range of bases (used for boundary-convention reports).
  std::size_t prime_count_up_to(std::uint32_t p, std::uint32_t n_limit) const {
    const std::size_t row = row_of(p);
    std::size_t count = 0;
    for (std::size_t j = 0; j < bases_.size() && bases_[j] <= n_limit; ++j)
      if (records_[row * bases_.size() + j].status == Primality::Prime) ++count;
    return count;
  }

 private:
  std::size_t row_of(std::uint32_t p) const {
    auto it = row_index_.find(p);
    if (it == row_index_.end())
      throw std::out_of_range("census: power " + std::to_string(p) + " is not a grid row");
    return it->second;
  }

  std::vector<std::uint32_t> powers_;
  std::vector<std::uint32_t> bases_;
  std::vector<PrimalityRecord> records_;  // row-major, powers x bases
  std::map<std::uint32_t, std::size_t> row_index_;
  std::vector<std::size_t> prime_counts_;
  std::vector<std::size_t> unknown_counts_;
};

namespace detail {

inline std::uint64_t cell_key(std::uint32_t n, std::uint32_t p) {
  return (static_cast<std::uint64_t>(p) << 32) | n;
}

inline std::string status_token(Primality s) { return std::string(arith::to_string(s)); }

inline Primality parse_status(const std::string& s) {
  if (s == "prime") return Primality::Prime;
  if (s == "composite") return Primality::Composite;
  if (s == "unknown") return Primality::UnknownOverLimit;
  throw std::runtime_error("unrecognized status '" + s + "'");
}

}  // namespace detail

/// One cache line. Key order is fixed: n, p, digits, status, method.
inline std::string cache_line(const PrimalityRecord& r) {
  std::ostringstream out;
  out << "{\"n\":" << r.n << ",\"p\":" << r.p << ",\"digits\":" << r.digits
      << ",\"status\":\"" << detail::status_token(r.status) << "\",\"method\":\""
      << r.method << "\"}";
  return out.str();
}

/// Load a JSON-lines cache. A truncated final line (interrupted scan) is
/// ignored; malformed content anywhere else is an error.
inline std::unordered_map<std::uint64_t, PrimalityRecord> load_cache(
    const std::filesystem::path& path) {
  std::unordered_map<std::uint64_t, PrimalityRecord> cache;
  if (!std::filesystem::exists(path)) return cache;  // absent cache is an empty cache
  std::ifstream in(path);
  if (!in) throw CacheError(path, "cannot open for reading");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      PrimalityRecord rec;
      rec.n = j.at("n").get<std::uint32_t>();
      rec.p = j.at("p").get<std::uint32_t>();
      rec.digits = j.at("digits").get<unsigned>();
      rec.status = detail::parse_status(j.at("status").get<std::string>());
      rec.method = j.at("method").get<std::string>();
      cache[detail::cell_key(rec.n, rec.p)] = rec;
    } catch (const std::exception& e) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // torn final line
      throw CacheError(path, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cache;
}

/// Compute one cell: digit check first, primality only under the limit.
inline PrimalityRecord compute_cell(std::uint32_t n, std::uint32_t p, unsigned digit_limit) {
  shell::ShellValue sv = shell::shell_value(n, p);
  PrimalityRecord rec{n, p, sv.digit_count, Primality::UnknownOverLimit, "digit-limit"};
  if (sv.digit_count > digit_limit) return rec;
  arith::PrimalityVerdict verdict = arith::is_prime(sv.value, digit_limit);
  rec.status = verdict.status;
  rec.method = verdict.method;
  return rec;
}

/// Scan the (base, prime power) grid. Cells are independent work units;
/// results land in a fixed slot per cell, so the grid is identical for any
/// worker count. Newly computed cells are appended to the cache as they
/// finish (single writer).
inline CensusGrid scan_grid(const GridConfig& config, ScanStats* stats = nullptr) {
  if (config.n_min < 2) throw std::invalid_argument("census: n_min must be >= 2");
  if (config.n_max < config.n_min) throw std::invalid_argument("census: n_max < n_min");
  if (config.p_max < 2 && !config.powers) throw std::invalid_argument("census: p_max must be >= 2");

  std::vector<std::uint32_t> powers =
      config.powers ? *config.powers : arith::primes_up_to(config.p_max);
  std::sort(powers.begin(), powers.end());
  powers.erase(std::unique(powers.begin(), powers.end()), powers.end());
  if (powers.empty()) throw std::invalid_argument("census: no prime rows in range");
  for (std::uint32_t p : powers)
    if (!arith::is_small_prime(p))
      throw std::invalid_argument("census: row " + std::to_string(p) + " is not prime");

  const std::uint32_t n_hi = config.inclusive_upper ? config.n_max : config.n_max - 1;
  if (n_hi < config.n_min) throw std::invalid_argument("census: empty base range");
  std::vector<std::uint32_t> bases;
  for (std::uint32_t n = config.n_min; n <= n_hi; ++n) bases.push_back(n);

  std::unordered_map<std::uint64_t, PrimalityRecord> cache;
  if (config.cache_path) cache = load_cache(*config.cache_path);

  ScanStats local_stats;
  local_stats.cells = powers.size() * bases.size();

  std::vector<PrimalityRecord> records(powers.size() * bases.size());
  struct Todo {
    std::size_t slot;
    std::uint32_t n, p;
  };
  std::vector<Todo> todo;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    for (std::size_t j = 0; j < bases.size(); ++j) {
      const std::size_t slot = i * bases.size() + j;
      auto it = cache.find(detail::cell_key(bases[j], powers[i]));
      if (it != cache.end()) {
        records[slot] = it->second;
        ++local_stats.cache_hits;
      } else {
        todo.push_back({slot, bases[j], powers[i]});
      }
    }
  }

  std::ofstream cache_out;
  std::mutex cache_mutex;
  if (config.cache_path && !todo.empty()) {
    cache_out.open(*config.cache_path, std::ios::app);
    if (!cache_out) throw CacheError(*config.cache_path, "cannot open for append");
  }

  const auto run_cell = [&](const Todo& t) {
    PrimalityRecord rec = compute_cell(t.n, t.p, config.digit_limit);
    if (cache_out.is_open()) {
      std::lock_guard<std::mutex> lock(cache_mutex);
      cache_out << cache_line(rec) << '\n' << std::flush;
      if (!cache_out) throw CacheError(*config.cache_path, "write failed");
    }
    records[t.slot] = rec;
  };

  unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(todo.size(), 1)));

  if (workers <= 1 || todo.size() <= 1) {
    for (const Todo& t : todo) run_cell(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= todo.size()) return;
          try {
            run_cell(todo[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  local_stats.tested = todo.size();
  for (const auto& rec : records)
    if (rec.status == Primality::UnknownOverLimit) ++local_stats.over_limit;
  if (stats) *stats = local_stats;

  return CensusGrid(std::move(powers), std::move(bases), std::move(records));
}

/// Count of prime verdicts in row p (untestable cells excluded).
inline std::size_t count_shell_primes(const CensusGrid& grid, std::uint32_t p) {
  return grid.prime_count(p);
}

/// All primes p <= p_max (subject to the digit limit) for which
/// n^p - (n-1)^p is prime, ascending in p, with the values.
inline std::vector<std::pair<std::uint32_t, shell::ShellValue>> base_sequence(
    std::uint32_t n, std::uint32_t p_max, unsigned digit_limit = arith::kDefaultDigitLimit) {
  if (n < 2) throw std::invalid_argument("base_sequence: base must be >= 2");
  std::vector<std::pair<std::uint32_t, shell::ShellValue>> out;
  for (std::uint32_t p : arith::primes_up_to(p_max)) {
    shell::ShellValue sv = shell::shell_value(n, p);
    if (sv.digit_count > digit_limit) break;  // values only grow with p
    if (arith::is_prime(sv.value, digit_limit).is_prime()) out.emplace_back(p, std::move(sv));
  }
  return out;
}

/// Histogram of last digits over the grid's prime cells.
inline std::map<int, std::size_t> ending_digit_histogram(const CensusGrid& grid) {
  std::map<int, std::size_t> hist;
  for (const auto& rec : grid.records())
    if (rec.status == Primality::Prime)
      ++hist[shell::last_digit(static_cast<int>(rec.n % 10), rec.p)];
  return hist;
}

/// Same histogram restricted to one row.
inline std::map<int, std::size_t> row_digit_histogram(const CensusGrid& grid, std::uint32_t p) {
  if (!grid.has_row(p))
    throw std::out_of_range("census: power " + std::to_string(p) + " is not a grid row");
  std::map<int, std::size_t> hist;
  for (const auto& rec : grid.records())
    if (rec.p == p && rec.status == Primality::Prime)
      ++hist[shell::last_digit(static_cast<int>(rec.n % 10), rec.p)];
  return hist;
}

/// Grid CSV export: "p,n,digits,status", sorted by (p, n).
inline void write_grid_csv(std::ostream& out, const CensusGrid& grid) {
  out << "p,n,digits,status\n";
  for (std::size_t i = 0; i < grid.powers().size(); ++i)
    for (std::size_t j = 0; j < grid.bases().size(); ++j) {
      const PrimalityRecord& rec = grid.records()[i * grid.bases().size() + j];
      out << rec.p << ',' << rec.n << ',' << rec.digits << ','
          << detail::status_token(rec.status) << '\n';
    }
}

}  // namespace shellprime::census
