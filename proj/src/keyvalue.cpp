#include "paramt/keyvalue.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "paramt/error.hpp"
#include "paramt/text.hpp"

namespace paramt {

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::string section;
  size_t lineno = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw Error(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(origin + ":" + std::to_string(lineno) + ": empty key");
    kv.values_[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t KeyValueFile::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const int64_t n = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw Error(origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
  return n;
}

int64_t KeyValueFile::get_int_or(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

uint64_t KeyValueFile::get_u64_or(const std::string& key, uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  char* end = nullptr;
  const uint64_t n = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw Error(origin_ + ": key '" + key + "' is not an unsigned integer: '" + v + "'");
  return n;
}

double KeyValueFile::get_real(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw Error(origin_ + ": key '" + key + "' is not a number: '" + v + "'");
  return x;
}

double KeyValueFile::get_real_or(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

std::vector<std::string> KeyValueFile::section_keys(const std::string& section) const {
  const std::string prefix = section + ".";
  std::vector<std::string> out;
  for (const auto& [k, _] : values_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k.substr(prefix.size()));
  return out;
}

std::string KeyValueFile::normalized() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace paramt
