#include "densel/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace densel {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace densel
