#include "nlcb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlcb {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// Strip a trailing comment (outside strings) and surrounding whitespace.
std::string strip(const std::string& raw) {
  std::string s;
  bool in_str = false;
  for (size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '"' && (i == 0 || raw[i - 1] != '\\')) in_str = !in_str;
    if (c == '#' && !in_str) break;
    s += c;
  }
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Cursor {
  const std::string& s;
  size_t i = 0;
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() const { return i >= s.size(); }
};

} // namespace

void Config::fail(const std::string& what, int line) const {
  std::ostringstream msg;
  msg << name_ << ":" << line << ": " << what;
  throw ConfigError(msg.str());
}

namespace {

Config::Value parse_scalar(Cursor& c, int line, const std::string& name) {
  auto fail = [&](const std::string& what) -> void {
    std::ostringstream msg;
    msg << name << ":" << line << ": " << what;
    throw ConfigError(msg.str());
  };
  Config::Value v;
  v.line = line;
  c.skip_ws();
  if (c.done()) fail("missing value");
  if (c.s[c.i] == '"') {
    v.kind = Config::Value::Kind::String;
    ++c.i;
    while (c.i < c.s.size() && c.s[c.i] != '"') {
      if (c.s[c.i] == '\\' && c.i + 1 < c.s.size() &&
          (c.s[c.i + 1] == '"' || c.s[c.i + 1] == '\\'))
        ++c.i;
      v.str += c.s[c.i++];
    }
    if (c.i >= c.s.size()) fail("unterminated string");
    ++c.i;
    return v;
  }
  size_t start = c.i;
  while (c.i < c.s.size() && c.s[c.i] != ',' && c.s[c.i] != ']' && c.s[c.i] != ' ' &&
         c.s[c.i] != '\t')
    ++c.i;
  const std::string tok = c.s.substr(start, c.i - start);
  if (tok == "true" || tok == "false") {
    v.kind = Config::Value::Kind::Bool;
    v.flag = tok == "true";
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v.num))
    fail("cannot parse value '" + tok + "'");
  v.kind = Config::Value::Kind::Number;
  return v;
}

Config::Value parse_value(const std::string& text, int line, const std::string& name) {
  auto fail = [&](const std::string& what) -> void {
    std::ostringstream msg;
    msg << name << ":" << line << ": " << what;
    throw ConfigError(msg.str());
  };
  Cursor c{text};
  c.skip_ws();
  if (c.done()) fail("missing value");
  Config::Value v;
  v.line = line;
  if (c.s[c.i] == '[') {
    v.kind = Config::Value::Kind::Array;
    ++c.i;
    c.skip_ws();
    if (!c.done() && c.s[c.i] == ']') {
      ++c.i;
    } else {
      while (true) {
        if (!c.done() && c.s[c.i] == '[') fail("nested arrays are not supported");
        v.items.push_back(parse_scalar(c, line, name));
        c.skip_ws();
        if (c.done()) fail("unterminated array");
        if (c.s[c.i] == ',') {
          ++c.i;
          continue;
        }
        if (c.s[c.i] == ']') {
          ++c.i;
          break;
        }
        fail("expected ',' or ']' in array");
      }
    }
  } else {
    v = parse_scalar(c, line, name);
  }
  c.skip_ws();
  if (!c.done()) fail("trailing characters after value");
  return v;
}

} // namespace

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') cfg.fail("expected ']' to close section header", line);
      section = s.substr(1, s.size() - 2);
      if (section.empty() || !std::all_of(section.begin(), section.end(), ident_char))
        cfg.fail("invalid section name '" + section + "'", line);
      if (cfg.table_.count(section)) cfg.fail("duplicate section [" + section + "]", line);
      cfg.table_[section];
      cfg.section_order_.push_back(section);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) cfg.fail("expected 'key = value'", line);
    std::string key = strip(s.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), ident_char))
      cfg.fail("invalid key '" + key + "'", line);
    if (section.empty()) cfg.fail("key '" + key + "' outside any [section]", line);
    if (cfg.table_[section].count(key))
      cfg.fail("duplicate key '" + key + "' in [" + section + "]", line);
    cfg.table_[section][key] = parse_value(s.substr(eq + 1), line, name);
    cfg.key_order_[section].push_back(key);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = table_.find(section);
  return s != table_.end() && s->second.count(key) > 0;
}

Config::Value::Kind Config::kind(const std::string& section, const std::string& key) const {
  return at(section, key).kind;
}

const Config::Value& Config::at(const std::string& section, const std::string& key) const {
  const auto s = table_.find(section);
  if (s == table_.end()) throw ConfigError(name_ + ": missing section [" + section + "]");
  const auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError(name_ + ": missing key '" + key + "' in [" + section + "]");
  return k->second;
}

double Config::number(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::Number)
    fail("key '" + key + "' in [" + section + "] must be a number", v.line);
  return v.num;
}

double Config::number(const std::string& section, const std::string& key, double dflt) const {
  return has(section, key) ? number(section, key) : dflt;
}

int Config::integer(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::Number || v.num != std::floor(v.num))
    fail("key '" + key + "' in [" + section + "] must be an integer", v.line);
  return static_cast<int>(v.num);
}

int Config::integer(const std::string& section, const std::string& key, int dflt) const {
  return has(section, key) ? integer(section, key) : dflt;
}

std::string Config::str(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::String)
    fail("key '" + key + "' in [" + section + "] must be a string", v.line);
  return v.str;
}

std::string Config::str(const std::string& section, const std::string& key,
                        const std::string& dflt) const {
  return has(section, key) ? str(section, key) : dflt;
}

bool Config::boolean(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::Bool)
    fail("key '" + key + "' in [" + section + "] must be true or false", v.line);
  return v.flag;
}

bool Config::boolean(const std::string& section, const std::string& key, bool dflt) const {
  return has(section, key) ? boolean(section, key) : dflt;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::Array)
    fail("key '" + key + "' in [" + section + "] must be an array", v.line);
  std::vector<double> out;
  for (const Value& item : v.items) {
    if (item.kind != Value::Kind::Number)
      fail("array '" + key + "' in [" + section + "] must hold numbers", v.line);
    out.push_back(item.num);
  }
  return out;
}

std::vector<std::string> Config::strings(const std::string& section, const std::string& key) const {
  const Value& v = at(section, key);
  if (v.kind != Value::Kind::Array)
    fail("key '" + key + "' in [" + section + "] must be an array", v.line);
  std::vector<std::string> out;
  for (const Value& item : v.items) {
    if (item.kind != Value::Kind::String)
      fail("array '" + key + "' in [" + section + "] must hold strings", v.line);
    out.push_back(item.str);
  }
  return out;
}

std::vector<std::string> Config::sections() const { return section_order_; }

std::vector<std::string> Config::keys(const std::string& section) const {
  const auto it = key_order_.find(section);
  return it == key_order_.end() ? std::vector<std::string>{} : it->second;
}

} // namespace nlcb
