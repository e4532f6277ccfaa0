#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace paramt {

// Flat sectioned key-value config:
//   [model]
//   hidden_dim = 64   # trailing comments allowed
// Keys address as "model.hidden_dim". Later assignments win.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key) const;
  int64_t get_int_or(const std::string& key, int64_t fallback) const;
  uint64_t get_u64_or(const std::string& key, uint64_t fallback) const;
  double get_real(const std::string& key) const;
  double get_real_or(const std::string& key, double fallback) const;

  // Keys under "section." in lexicographic order, prefix stripped.
  std::vector<std::string> section_keys(const std::string& section) const;

  // Canonical "key = value" dump, sorted; config digests hash this.
  std::string normalized() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace paramt
