#pragma once

namespace occdet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace occdet
