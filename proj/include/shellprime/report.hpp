#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace shellprime::report {

/// UTC timestamp, RFC 3339. Honors SOURCE_DATE_EPOCH for reproducible runs.
inline std::string rfc3339_utc_now() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Write-then-rename so readers never observe a half-written file.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// One comparison row of a reproduction manifest.
struct ManifestRow {
  std::string label;
  nlohmann::json paper_value;
  nlohmann::json computed_value;
  double abs_diff = 0.0;
  bool pass = false;
};

struct Manifest {
  std::string artifact_id;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<ManifestRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["artifact_id"] = artifact_id;
    j["generated_at"] = rfc3339_utc_now();
    j["parameters"] = parameters;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"label", r.label},
                           {"paper_value", r.paper_value},
                           {"computed_value", r.computed_value},
                           {"abs_diff", r.abs_diff},
                           {"pass", r.pass}});
    }
    return j;
  }

  /// Refuses to overwrite an existing manifest unless forced.
  void write(const std::filesystem::path& path, bool force) const {
    if (!force && std::filesystem::exists(path))
      throw std::runtime_error("manifest " + path.string() +
                               " already exists (use --force to overwrite)");
    atomic_write(path, to_json().dump(2) + "\n");
  }
};

}  // namespace shellprime::report
