#pragma once

#include <numbers>

namespace mnpt {

struct PhysicalConstants {
  static constexpr double k_B = 1.380649e-23;                // J/K
  static constexpr double mu_0 = 4.0e-7 * std::numbers::pi;  // T·m/A
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace mnpt
