#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace offlang {

// Ordered key=value configuration. Insertion (file) order is preserved; it
// drives grid-expansion order and report formatting.
class KvConfig {
 public:
  KvConfig() = default;

  // Parses line-oriented `key = value` text; '#' starts a comment, blank
  // lines are skipped. Duplicate keys are rejected.
  static KvConfig parse(const std::string& text);
  static KvConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  const std::string& get_or(const std::string& key,
                            const std::string& fallback) const;

  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }

  // "k1=v1,k2=v2" rendering used in grid reports.
  std::string brief() const;

  bool operator==(const KvConfig&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Splits a comma-separated list value; no empty items.
std::vector<std::string> split_list(const std::string& value);

// Expands list-valued entries into the Cartesian product, file order:
// earlier keys vary slower. Single-valued keys pass through.
std::vector<KvConfig> expand_grid(const KvConfig& grid_config);

}  // namespace offlang
