#include "sqreg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sqreg::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
  const std::size_t pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

Ini Ini::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Ini Ini::parse_string(const std::string& text, const std::string& origin) {
  Ini ini;
  ini.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  long line_no = 0;
  std::string section;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      if (!ini.sections_.count(section)) {
        ini.order_.push_back(section);
        ini.sections_[section];
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (section.empty()) {
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": key outside any [section]");
    }
    auto& sec = ini.sections_[section];
    if (sec.count(key)) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                       "' in [" + section + "]");
    }
    sec[key] = Entry{value, line_no};
  }
  return ini;
}

bool Ini::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

bool Ini::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const Ini::Entry* Ini::find(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return nullptr;
  consumed_.insert({section, key});
  return &it->second;
}

const Ini::Entry& Ini::require(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) {
    throw ConfigError(origin_ + ": missing key '" + key + "' in [" + section + "]");
  }
  return *e;
}

void Ini::fail_value(const std::string& section, const std::string& key, const Entry& e,
                     const std::string& want) const {
  throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key + "' in [" +
                    section + "]: expected " + want + ", got '" + e.value + "'");
}

std::string Ini::get_string(const std::string& section, const std::string& key) const {
  return require(section, key).value;
}

std::string Ini::get_string(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Ini::get_double(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') fail_value(section, key, e, "a number");
  return v;
}

double Ini::get_double(const std::string& section, const std::string& key,
                       double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Ini::get_long(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') fail_value(section, key, e, "an integer");
  return v;
}

long Ini::get_long(const std::string& section, const std::string& key,
                   long fallback) const {
  return has(section, key) ? get_long(section, key) : fallback;
}

unsigned long long Ini::get_u64(const std::string& section, const std::string& key,
                                unsigned long long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const char* begin = e->value.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || e->value.front() == '-') {
    fail_value(section, key, *e, "a nonnegative integer");
  }
  return v;
}

bool Ini::get_bool(const std::string& section, const std::string& key,
                   bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail_value(section, key, *e, "a boolean");
}

void Ini::check_all_consumed() const {
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!consumed_.count({section, key})) {
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                          key + "' in [" + section + "]");
      }
    }
  }
}

}  // namespace sqreg::config
