#pragma once

namespace nsalpha {

inline const char* version_string() { return "1.0.0"; }

}  // namespace nsalpha
