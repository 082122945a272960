#pragma once

#include <numbers>

// Everything inside the library is SI: metres, seconds, rad/s.
namespace cavreg::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double um = 1e-6;
inline constexpr double nm = 1e-9;
inline constexpr double km = 1e3;
inline constexpr double us = 1e-6;
inline constexpr double ms = 1e-3;
inline constexpr double ns = 1e-9;

// Angular frequency for an ordinary frequency given in MHz / kHz.
constexpr double angular_mhz(double f_mhz) { return two_pi * f_mhz * 1e6; }
constexpr double angular_khz(double f_khz) { return two_pi * f_khz * 1e3; }

}  // namespace cavreg::units
