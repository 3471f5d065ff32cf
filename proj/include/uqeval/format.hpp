#pragma once

#include <string>

namespace uqeval {

/// Shortest "%g"-style rendering with 6 significant digits, independent of
/// the C locale. Non-finite values print as inf, -inf and nan.
std::string format_number(double value);

/// Rounds to `digits` significant digits by way of the decimal rendering.
double round_significant(double value, int digits = 6);

}  // namespace uqeval
