#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlcb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict parser for the TOML subset used by scenario files: [section]
/// headers, key = value lines, scalar values (number, "string", bool) and
/// one-line arrays of scalars, # comments. Anything else is an error with a
/// file:line diagnostic, as are duplicate sections or keys.
class Config {
public:
  struct Value {
    enum class Kind { Number, String, Bool, Array };
    Kind kind = Kind::Number;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<Value> items;
    int line = 0;
  };

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& name);

  bool has(const std::string& section, const std::string& key) const;
  Value::Kind kind(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double dflt) const;
  int integer(const std::string& section, const std::string& key) const;
  int integer(const std::string& section, const std::string& key, int dflt) const;
  std::string str(const std::string& section, const std::string& key) const;
  std::string str(const std::string& section, const std::string& key,
                  const std::string& dflt) const;
  bool boolean(const std::string& section, const std::string& key) const;
  bool boolean(const std::string& section, const std::string& key, bool dflt) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::string> strings(const std::string& section, const std::string& key) const;

  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;
  const std::string& name() const { return name_; }

private:
  const Value& at(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& what, int line) const;

  std::string name_;
  std::map<std::string, std::map<std::string, Value>> table_;
  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<std::string>> key_order_;
};

} // namespace nlcb
