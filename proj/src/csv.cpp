#include "streamcode/csv.hpp"

#include <cstdio>

namespace streamcode::csv {

std::string g6(double x)
{
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", x);
  return buffer;
}

std::string rational(const Rational& r)
{
  if (r.denominator() == 1) {
    return std::to_string(r.numerator());
  }
  return g6(boost::rational_cast<double>(r));
}

std::string optional_int(const std::optional<int>& x)
{
  return x ? std::to_string(*x) : std::string{};
}

std::string row(const std::vector<std::string>& fields)
{
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) {
      out += ',';
    }
    out += fields[i];
  }
  out += '\n';
  return out;
}

std::string comment_block(const std::vector<std::string>& lines)
{
  std::string out;
  for (const auto& line : lines) {
    out += "# ";
    out += line;
    out += '\n';
  }
  return out;
}

} // namespace streamcode::csv
