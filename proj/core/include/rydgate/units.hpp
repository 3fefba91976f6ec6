#pragma once

#include <cmath>

// Internal units are angular frequencies in rad/us and times in us.
// Experiment configs use lab units (MHz, kHz, uK); conversion happens once,
// at the config boundary, via the helpers below.
namespace rydgate::units {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline constexpr double radPerUsFromMHz(double mhz) { return kTwoPi * mhz; }
inline constexpr double radPerUsFromKHz(double khz) { return kTwoPi * khz * 1e-3; }
inline constexpr double mhzFromRadPerUs(double w) { return w / kTwoPi; }

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kMassRb87 = 86.909180527 * kAtomicMassUnit;  // kg

// Most probable speed of the Maxwell-Boltzmann distribution, in um/us
// (numerically equal to m/s), for a temperature given in K.
inline double thermalSpeed(double kelvin) {
    return std::sqrt(2.0 * kBoltzmann * kelvin / kMassRb87);
}

}  // namespace rydgate::units
