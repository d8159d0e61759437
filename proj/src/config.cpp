#include "infind/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace infind {

namespace {

std::string trim(const std::string& s) {
  const auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  const auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return first < last ? std::string(first, last) : std::string();
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (out.values_.count(key)) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out.values_[key] = value;
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

const std::string* KeyValueConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  return v ? parse_number<double>(key, *v) : fallback;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  // Accept scientific shorthand such as 1e5 for step counts.
  if (v->find_first_of("eE.") != std::string::npos) {
    const double d = parse_number<double>(key, *v);
    if (d != static_cast<double>(static_cast<long>(d))) {
      throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
    }
    return static_cast<long>(d);
  }
  return parse_number<long>(key, *v);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return static_cast<int>(get_long(key, fallback));
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::string lower = *v;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + *v + "' as a boolean");
}

std::vector<std::uint64_t> KeyValueConfig::get_seed_list(const std::string& key,
                                                         const std::vector<std::uint64_t>& fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<std::uint64_t> out;
  for (const std::string& item : split(*v, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_number<std::uint64_t>(key, item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(key, trim(item.substr(0, dash)));
    const auto hi = parse_number<std::uint64_t>(key, trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError("config key '" + key + "': empty range '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
  return out;
}

std::vector<long> KeyValueConfig::get_long_list(const std::string& key, const std::vector<long>& fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  std::vector<long> out;
  KeyValueConfig scratch;
  for (const std::string& item : split(*v, ',')) {
    scratch.set(key, item);
    out.push_back(scratch.get_long(key, 0));
  }
  return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

void KeyValueConfig::reject_unused() const {
  const std::vector<std::string> unused = unused_keys();
  if (unused.empty()) return;
  std::string msg = "unknown config key(s):";
  for (const std::string& k : unused) msg += " " + k;
  throw ConfigError(msg);
}

}  // namespace infind
