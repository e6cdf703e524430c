#pragma once

#include <string>

namespace twostrain {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace twostrain
