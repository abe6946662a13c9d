#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace lmsamp::config {

/// Flat "key = value" text with '#' comments. Unknown keys are rejected once
/// parsing is finished (require_all_consumed).
class KeyValues {
 public:
  static KeyValues parse_file(const std::string& path);
  static KeyValues parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  long get_long(const std::string& key, long dflt) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;

  /// Throws std::domain_error naming the first key that was never read.
  void require_all_consumed() const;

  /// Canonical "key = value" lines (sorted), for echoing into run records.
  std::string echo() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

}  // namespace lmsamp::config
