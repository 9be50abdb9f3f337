#pragma once

#include <string>
#include <string_view>

namespace artic {

/// Shortest decimal text that parses back to the same binary64 value.
std::string format_real(double value);

/// Parses a complete token as a real number; returns false on any trailing junk.
bool parse_real(std::string_view token, double& out);
bool parse_int(std::string_view token, long long& out);

}  // namespace artic
