#include "contactforge/toml.hpp"

#include <cctype>
#include <cstdlib>

namespace cforge {

const std::string& TomlValue::as_string() const {
  if (kind != Kind::String)
    throw Error(ErrKind::Parse, "expected a string value (line " + std::to_string(line) + ")");
  return str;
}

double TomlValue::as_number() const {
  if (kind != Kind::Number)
    throw Error(ErrKind::Parse, "expected a number (line " + std::to_string(line) + ")");
  return num;
}

bool TomlValue::as_bool() const {
  if (kind != Kind::Boolean)
    throw Error(ErrKind::Parse, "expected a boolean (line " + std::to_string(line) + ")");
  return boolean;
}

std::vector<std::string> TomlValue::as_string_array() const {
  if (kind != Kind::Array)
    throw Error(ErrKind::Parse, "expected an array (line " + std::to_string(line) + ")");
  std::vector<std::string> out;
  for (const auto& v : array) out.push_back(v.as_string());
  return out;
}

std::vector<double> TomlValue::as_number_array() const {
  if (kind != Kind::Array)
    throw Error(ErrKind::Parse, "expected an array (line " + std::to_string(line) + ")");
  std::vector<double> out;
  for (const auto& v : array) out.push_back(v.as_number());
  return out;
}

const TomlValue* TomlDoc::find(const TomlKeyValues& kv, const std::string& key) const {
  for (const auto& [k, v] : kv)
    if (k == key) return &v;
  return nullptr;
}

const TomlKeyValues* TomlDoc::table(const std::string& path) const {
  auto it = tables.find(path);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  TomlDoc run() {
    TomlDoc doc;
    TomlKeyValues* target = &doc.root;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '[') {
        bool is_array = next_is("[[");
        std::string path = parse_header(is_array);
        if (is_array) {
          doc.table_arrays[path].emplace_back();
          target = &doc.table_arrays[path].back();
        } else {
          if (doc.tables.count(path))
            fail("table [" + path + "] appears twice");
          target = &doc.tables[path];
        }
      } else {
        auto [key, value] = parse_key_value();
        for (const auto& [k, v] : *target)
          if (k == key) fail("duplicate key '" + key + "'");
        target->emplace_back(std::move(key), std::move(value));
      }
      expect_line_end();
    }
    return doc;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  bool next_is(const char* s) const {
    return text_.compare(pos_, std::string::traits_type::length(s), s) == 0;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrKind::Parse, msg + " (line " + std::to_string(line_) + ")");
  }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_inline_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (!at_end() && peek() == '#')
      while (!at_end() && peek() != '\n') advance();
  }

  void skip_blank() {
    for (;;) {
      skip_inline_ws();
      skip_comment();
      if (!at_end() && peek() == '\n') {
        advance();
        continue;
      }
      if (!at_end() && peek() == '\r') {
        advance();
        continue;
      }
      return;
    }
  }

  void expect_line_end() {
    skip_inline_ws();
    skip_comment();
    if (at_end()) return;
    if (peek() == '\n' || peek() == '\r') {
      advance();
      return;
    }
    fail(std::string("unexpected character '") + peek() + "' after value");
  }

  std::string parse_header(bool is_array) {
    advance();  // [
    if (is_array) advance();
    skip_inline_ws();
    std::string path = parse_key();
    while (!at_end() && peek() == '.') {
      advance();
      path += '.';
      path += parse_key();
    }
    skip_inline_ws();
    if (at_end() || peek() != ']') fail("missing ']' in table header");
    advance();
    if (is_array) {
      if (at_end() || peek() != ']') fail("missing ']]' in array-of-tables header");
      advance();
    }
    return path;
  }

  std::string parse_key() {
    skip_inline_ws();
    if (at_end()) fail("expected a key");
    if (peek() == '"') return parse_quoted();
    std::string key;
    while (!at_end() &&
           (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      key += text_[pos_], advance();
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::string parse_quoted() {
    advance();  // opening quote
    std::string s;
    while (!at_end() && peek() != '"') {
      if (peek() == '\n') fail("unterminated string");
      if (peek() == '\\') {
        advance();
        if (at_end()) fail("unterminated escape");
        char c = peek();
        switch (c) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + c + "'");
        }
        advance();
        continue;
      }
      s += text_[pos_];
      advance();
    }
    if (at_end()) fail("unterminated string");
    advance();  // closing quote
    return s;
  }

  std::pair<std::string, TomlValue> parse_key_value() {
    std::string key = parse_key();
    skip_inline_ws();
    if (at_end() || peek() != '=') fail("expected '=' after key '" + key + "'");
    advance();
    skip_inline_ws();
    return {std::move(key), parse_value()};
  }

  TomlValue parse_value() {
    if (at_end()) fail("expected a value");
    TomlValue v;
    v.line = line_;
    char c = peek();
    if (c == '"') {
      v.kind = TomlValue::Kind::String;
      v.str = parse_quoted();
      return v;
    }
    if (c == '[') {
      advance();
      v.kind = TomlValue::Kind::Array;
      skip_blank();
      while (!at_end() && peek() != ']') {
        v.array.push_back(parse_value());
        skip_blank();
        if (!at_end() && peek() == ',') {
          advance();
          skip_blank();
        }
      }
      if (at_end()) fail("unterminated array");
      advance();
      return v;
    }
    if (next_is("true") || next_is("false")) {
      v.kind = TomlValue::Kind::Boolean;
      v.boolean = next_is("true");
      pos_ += v.boolean ? 4 : 5;
      return v;
    }
    // number
    std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                         peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E'))
      advance();
    std::string token = text_.substr(start, pos_ - start);
    if (token.empty()) fail("expected a value");
    char* end = nullptr;
    v.kind = TomlValue::Kind::Number;
    v.num = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("malformed number '" + token + "'");
    return v;
  }
};

}  // namespace

TomlDoc toml_parse(const std::string& text) { return TomlParser(text).run(); }

}  // namespace cforge
