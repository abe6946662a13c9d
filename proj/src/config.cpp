#include "lmsamp/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lmsamp::config {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

KeyValues KeyValues::parse_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("config line " + std::to_string(lineno) +
                              " is not 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::domain_error("config line " + std::to_string(lineno) +
                              " has an empty key");
    kv.kv_[key] = val;
  }
  return kv;
}

bool KeyValues::has(const std::string& key) const {
  return kv_.count(key) != 0;
}

std::string KeyValues::get_str(const std::string& key,
                               const std::string& dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double KeyValues::get_double(const std::string& key, double dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::domain_error("config value for '" + key + "' is not a number");
  }
}

long KeyValues::get_long(const std::string& key, long dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw std::domain_error("config value for '" + key +
                            "' is not an integer");
  }
}

std::uint64_t KeyValues::get_u64(const std::string& key,
                                 std::uint64_t dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw std::domain_error("config value for '" + key +
                            "' is not an integer");
  }
}

void KeyValues::require_all_consumed() const {
  for (const auto& [k, v] : kv_)
    if (consumed_.count(k) == 0)
      throw std::domain_error("unknown config key: " + k);
}

std::string KeyValues::echo() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace lmsamp::config
