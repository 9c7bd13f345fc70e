#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Small helpers shared by the line-oriented text formats.
namespace spamfilter::text {

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a full string as a double; throws InvalidArgument.
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);
std::int64_t parse_i64(std::string_view s);

/// Escapes '%', whitespace and control bytes as %XX so ids survive
/// whitespace-separated records.
std::string escape_token(std::string_view s);
std::string unescape_token(std::string_view s);

std::string_view trim(std::string_view s);

std::string hex64(std::uint64_t v);

/// FNV-1a, 64-bit.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update_u64(std::uint64_t v);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace spamfilter::text
