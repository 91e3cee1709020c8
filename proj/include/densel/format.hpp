#pragma once

#include <string>

namespace densel {

/// Locale-independent rendering with 17 significant
/// digits; non-finite values become "inf", "-inf" or "nan".
std::string format_real(double x);

}  // namespace densel
