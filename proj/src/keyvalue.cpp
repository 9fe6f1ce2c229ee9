#include "stackfit/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "stackfit/error.hpp"

namespace stackfit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::InvalidInput, "'" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::string norm = text;
  for (char& c : norm) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(norm);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double("list", tok));
  return out;
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::MalformedHeader, "line " + std::to_string(lineno) + ": expected 'key: value'");
    }
    const std::string key = trim(t.substr(0, colon));
    if (key.empty()) throw Error(ErrorCode::MalformedHeader, "line " + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key)) {
      throw Error(ErrorCode::MalformedHeader, "duplicate key '" + key + "'");
    }
    kv.values_[key] = trim(t.substr(colon + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw Error(ErrorCode::MalformedHeader, "missing key '" + key + "'");
  return *v;
}

double KeyValueFile::get_double(const std::string& key) const { return to_double(key, require(key)); }

long long KeyValueFile::get_int(const std::string& key) const {
  const std::string t = trim(require(key));
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::InvalidInput, "'" + key + "' is not an integer: '" + t + "'");
  }
  return v;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
  return parse_number_list(require(key));
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + ": " + v + "\n";
  return out;
}

}  // namespace stackfit
