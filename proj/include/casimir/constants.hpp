#pragma once

#include <numbers>

namespace casimir::constants {

// CODATA 2018 exact / recommended values.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double c = 299792458.0;             // m / s
inline constexpr double k_B = 1.380649e-23;          // J / K
inline constexpr double pi = std::numbers::pi;
inline constexpr double zeta3 = 1.2020569031595942854;

}  // namespace casimir::constants
