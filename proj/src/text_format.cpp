#include "artic/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace artic {

std::string format_real(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot format non-finite real");
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_real: to_chars failed");
  return std::string(buf.data(), ptr);
}

bool parse_real(std::string_view token, double& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view token, long long& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace artic
