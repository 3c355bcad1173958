#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsim {

// Raised by every loader on malformed input; message carries the line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Shortest exact decimal representation; parsing it recovers the identical
// bit pattern, which the config round-trip guarantee depends on.
std::string format_double(double v);

// Fixed-point formatting for display columns (times in us etc.).
std::string format_fixed(double v, int digits);

// Whitespace-separated token with source line, '#' starts a comment.
struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(const std::string& content);

// Sequential token reader with line-aware errors.
class TokenStream {
 public:
  TokenStream(std::string file, std::vector<Token> tokens)
      : file_(std::move(file)), tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const;
  Token next();
  // Consumes one token and checks it equals `expected`.
  void expect(const std::string& expected);
  // Current line for error reporting (line of the next token, or the last).
  int line() const;

  [[noreturn]] void fail(const std::string& what) const;

  std::string next_word();
  double next_double();
  long long next_int();
  bool next_bool();  // true/false

 private:
  std::string file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mcsim
