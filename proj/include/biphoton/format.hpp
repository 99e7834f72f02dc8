#pragma once

#include <string>

namespace biphoton {

/// Fixed output precision for every emitted number.
inline constexpr int kOutputDigits = 9;

/// "%.9g" rendering; NaN and infinities spelled "nan", "inf", "-inf".
std::string format_number(double value);

/// Rounds to kOutputDigits significant digits, so that serialisers that print
/// the shortest round-trip form reproduce the same text.
double round_to_output_precision(double value);

}  // namespace biphoton
