#include "uqeval/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace uqeval {

namespace {

std::string render(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_number(double value) { return render(value, 6); }

double round_significant(double value, int digits) {
  if (!std::isfinite(value)) return value;
  const std::string text = render(value, digits);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace uqeval
