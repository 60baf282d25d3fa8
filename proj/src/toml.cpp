#include "mvtk/toml.hpp"

#include <cctype>
#include <cstdlib>

namespace mvtk::toml {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char take() {
    const char c = s[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) take();
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') take();
  }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
  throw ParseError(msg, c.line, c.col);
}

std::string parse_bare_key(Cursor& c) {
  std::string k;
  while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                      c.peek() == '_' || c.peek() == '-' || c.peek() == '.')) {
    k += c.take();
  }
  if (k.empty()) fail(c, "expected key");
  return k;
}

std::string parse_string(Cursor& c) {
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.eof()) fail(c, "unterminated string");
    const char ch = c.take();
    if (ch == '"') break;
    if (ch == '\\') {
      if (c.eof()) fail(c, "unterminated escape");
      const char e = c.take();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(c, std::string("unsupported escape \\") + e);
      }
    } else if (ch == '\n') {
      fail(c, "newline in string");
    } else {
      out += ch;
    }
  }
  return out;
}

Value parse_scalar(Cursor& c);

Value parse_array(Cursor& c) {
  c.take();  // '['
  Array arr;
  while (true) {
    c.skip_ws();
    if (c.eof()) fail(c, "unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    arr.push_back(parse_scalar(c));
    c.skip_ws();
    if (!c.eof() && c.peek() == ',') {
      c.take();
      continue;
    }
    c.skip_ws();
    if (c.eof() || c.peek() != ']') fail(c, "expected ',' or ']' in array");
  }
  return Value{arr};
}

Value parse_scalar(Cursor& c) {
  c.skip_ws();
  if (c.eof()) fail(c, "expected value");
  const char ch = c.peek();
  if (ch == '"') return Value{parse_string(c)};
  if (ch == '[') return parse_array(c);
  std::string tok;
  while (!c.eof() && c.peek() != '\n' && c.peek() != '#' && c.peek() != ',' &&
         c.peek() != ']') {
    tok += c.take();
  }
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
  if (tok == "true") return Value{true};
  if (tok == "false") return Value{false};
  if (tok.empty()) fail(c, "empty value");
  // integer?
  {
    char* end = nullptr;
    const long long iv = std::strtoll(tok.c_str(), &end, 10);
    if (end && *end == '\0' && tok.find_first_of(".eEnN") == std::string::npos)
      return Value{iv};
    (void)iv;
  }
  {
    char* end = nullptr;
    const double dv = std::strtod(tok.c_str(), &end);
    if (end && *end == '\0') return Value{dv};
  }
  fail(c, "cannot parse value '" + tok + "'");
}

}  // namespace

Table parse(const std::string& text) {
  Cursor c{text};
  Table out;
  std::string prefix;
  while (!c.eof()) {
    c.skip_ws();
    c.skip_comment();
    if (c.eof()) break;
    if (c.peek() == '\n' || c.peek() == '\r') {
      c.take();
      continue;
    }
    if (c.peek() == '[') {
      c.take();
      c.skip_ws();
      prefix = parse_bare_key(c);
      c.skip_ws();
      if (c.eof() || c.peek() != ']') fail(c, "expected ']' after table name");
      c.take();
      c.skip_ws();
      c.skip_comment();
      continue;
    }
    const int kl = c.line, kc = c.col;
    const std::string key = parse_bare_key(c);
    c.skip_ws();
    if (c.eof() || c.peek() != '=')
      throw ParseError("expected '=' after key '" + key + "'", kl, kc);
    c.take();
    Value v = parse_scalar(c);
    c.skip_ws();
    c.skip_comment();
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (out.count(full)) throw ParseError("duplicate key '" + full + "'", kl, kc);
    out.emplace(full, std::move(v));
  }
  return out;
}

}  // namespace mvtk::toml
