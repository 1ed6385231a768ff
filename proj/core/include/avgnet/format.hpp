#pragma once

#include <string>

namespace avgnet {

// Locale-independent decimal with 17 significant digits (round-trips).
std::string FormatDouble(double v);

}  // namespace avgnet
