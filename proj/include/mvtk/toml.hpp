#ifndef MVTK_TOML_HPP
#define MVTK_TOML_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mvtk::toml {

// Minimal TOML subset for run configs: [table] and [table.sub] headers,
// key = value pairs with strings, integers, floats, booleans and flat arrays,
// comments with '#'.  Errors carry line/column.

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_), col(col_) {}
  int line, col;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::string, long long, double, bool, Array> v;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_int() const { return std::holds_alternative<long long>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<Array>(v); }

  const std::string& as_string() const { return std::get<std::string>(v); }
  long long as_int() const { return std::get<long long>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const Array& as_array() const { return std::get<Array>(v); }
  // ints promote to double
  double as_number() const {
    return is_int() ? static_cast<double>(std::get<long long>(v)) : std::get<double>(v);
  }
};

// Keys are dotted paths "table.key"; maps keep deterministic (sorted) order.
using Table = std::map<std::string, Value>;

Table parse(const std::string& text);

}  // namespace mvtk::toml

#endif
