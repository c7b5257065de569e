#pragma once

namespace stlf {

inline const char* version_string() { return "0.1.0"; }

}  // namespace stlf
