#include "mcsim/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mcsim {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<Token> tokenize(const std::string& content) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    const char c = content[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < n && content[i] != '\n') ++i;
    } else if (c == '{' || c == '}') {
      out.push_back({std::string(1, c), line});
      ++i;
    } else {
      std::size_t start = i;
      while (i < n && !std::isspace(static_cast<unsigned char>(content[i])) &&
             content[i] != '{' && content[i] != '}' && content[i] != '#')
        ++i;
      out.push_back({content.substr(start, i - start), line});
    }
  }
  return out;
}

const Token& TokenStream::peek() const {
  if (done()) fail("unexpected end of file");
  return tokens_[pos_];
}

Token TokenStream::next() {
  if (done()) fail("unexpected end of file");
  return tokens_[pos_++];
}

void TokenStream::expect(const std::string& expected) {
  const Token t = next();
  if (t.text != expected)
    throw ParseError(file_, t.line,
                     "expected '" + expected + "', got '" + t.text + "'");
}

int TokenStream::line() const {
  if (pos_ < tokens_.size()) return tokens_[pos_].line;
  return tokens_.empty() ? 1 : tokens_.back().line;
}

void TokenStream::fail(const std::string& what) const {
  throw ParseError(file_, line(), what);
}

std::string TokenStream::next_word() { return next().text; }

double TokenStream::next_double() {
  const Token t = next();
  double value = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(file_, t.line, "expected a number, got '" + t.text + "'");
  return value;
}

long long TokenStream::next_int() {
  const Token t = next();
  long long value = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(file_, t.line,
                     "expected an integer, got '" + t.text + "'");
  return value;
}

bool TokenStream::next_bool() {
  const Token t = next();
  if (t.text == "true") return true;
  if (t.text == "false") return false;
  throw ParseError(file_, t.line,
                   "expected 'true' or 'false', got '" + t.text + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mcsim
