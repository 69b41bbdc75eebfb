#include "offlang/config.hpp"

#include <fstream>
#include <sstream>

#include "offlang/errors.hpp"

namespace offlang {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    if (out.has(key))
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": duplicate key '" + key + "'");
    out.entries_.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void KvConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

bool KvConfig::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& KvConfig::get_or(const std::string& key,
                                    const std::string& fallback) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return fallback;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double out = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': expected a number, got '" +
                          *v + "'");
  }
}

long KvConfig::get_long(const std::string& key, long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    long out = std::stol(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': expected an integer, got '" +
                          *v + "'");
  }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ValidationError("config key '" + key + "': expected a boolean, got '" +
                        *v + "'");
}

std::string KvConfig::brief() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    if (!out.empty()) out.push_back(',');
    out += k;
    out.push_back('=');
    out += v;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string item = comma == std::string::npos
                           ? value.substr(start)
                           : value.substr(start, comma - start);
    item = trim(item);
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<KvConfig> expand_grid(const KvConfig& grid_config) {
  std::vector<KvConfig> result{KvConfig{}};
  for (const auto& [key, value] : grid_config.entries()) {
    auto options = split_list(value);
    if (options.empty())
      throw ValidationError("grid key '" + key + "' has no values");
    std::vector<KvConfig> expanded;
    expanded.reserve(result.size() * options.size());
    for (const auto& partial : result) {
      for (const auto& option : options) {
        KvConfig next = partial;
        next.set(key, option);
        expanded.push_back(std::move(next));
      }
    }
    result = std::move(expanded);
  }
  return result;
}

}  // namespace offlang
