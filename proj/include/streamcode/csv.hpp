#pragma once

#include "streamcode/code.hpp"

#include <optional>
#include <string>
#include <vector>

namespace streamcode::csv {

/// Six significant digits, as every float column is written.
std::string g6(double x);
std::string rational(const Rational& r);
std::string optional_int(const std::optional<int>& x);

/// Joins fields with commas; fields are plain tokens, never quoted.
std::string row(const std::vector<std::string>& fields);

/// Prefixes each line with "# ".
std::string comment_block(const std::vector<std::string>& lines);

} // namespace streamcode::csv
