#pragma once

#include <map>
#include <string>
#include <vector>

#include "contactforge/errors.hpp"

namespace cforge {

// Minimal TOML subset: tables, arrays of tables, bare/quoted keys, string,
// number and boolean values, flat arrays, '#' comments. Enough for scenario
// files; anything else is a parse error with a line number.
struct TomlValue {
  enum class Kind { String, Number, Boolean, Array };
  Kind kind = Kind::String;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
  int line = 0;

  const std::string& as_string() const;
  double as_number() const;
  bool as_bool() const;
  std::vector<std::string> as_string_array() const;
  std::vector<double> as_number_array() const;
};

using TomlKeyValues = std::vector<std::pair<std::string, TomlValue>>;

struct TomlDoc {
  TomlKeyValues root;
  std::map<std::string, TomlKeyValues> tables;                    // "a.b" -> entries
  std::map<std::string, std::vector<TomlKeyValues>> table_arrays;  // "[[x]]" blocks in order

  const TomlValue* find(const TomlKeyValues& kv, const std::string& key) const;
  const TomlKeyValues* table(const std::string& path) const;
};

TomlDoc toml_parse(const std::string& text);

}  // namespace cforge
