#include "biphoton/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace biphoton {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, value);
  return buf;
}

double round_to_output_precision(double value) {
  if (!std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, value);
  return std::strtod(buf, nullptr);
}

}  // namespace biphoton
