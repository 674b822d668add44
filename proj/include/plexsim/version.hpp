#pragma once

namespace plexsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plexsim
