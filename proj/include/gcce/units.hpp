#pragma once

#include <numbers>

// Internal unit system: angular frequency in rad/ms, time in ms,
// magnetic field in Gauss, distance in Angstrom.
namespace gcce::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1 MHz expressed as an angular frequency in rad/ms.
inline constexpr double kMHz = kTwoPi * 1.0e3;

inline constexpr double kGaussPerTesla = 1.0e4;
inline constexpr double kMicrosecond = 1.0e-3; // in ms

// Bohr magneton over Planck constant, MHz/G (CODATA 2018: 13.9962449361 GHz/T).
inline constexpr double kBohrMHzPerGauss = 1.39962449361;
// mu_B / hbar in rad ms^-1 G^-1.
inline constexpr double kBohrRadPerMsGauss = kBohrMHzPerGauss * kMHz;

// mu0/(4 pi) * hbar in rad/ms * A^3 when gyromagnetic ratios are given in
// rad ms^-1 G^-1: 1.00000000055e-7 * 1.054571817e-34 * 1e14 * 1e30 / 1e3.
inline constexpr double kHbarMu0Over4Pi = 1.00000000055e-7 * 1.054571817e-34 * 1.0e14 * 1.0e30 * 1.0e-3;

inline constexpr double kFreeElectronG = 2.0023;

inline constexpr double kAvogadro = 6.02214076e23;

inline constexpr double mhz_to_rad_per_ms(double mhz) { return mhz * kMHz; }
inline constexpr double rad_per_ms_to_mhz(double w) { return w / kMHz; }

// Gyromagnetic ratio (rad ms^-1 G^-1) from a g factor times a magneton given in MHz/T.
inline constexpr double gamma_from_magneton(double g, double magneton_mhz_per_tesla) {
    return g * magneton_mhz_per_tesla / kGaussPerTesla * kMHz;
}

// Signed electron gyromagnetic ratio for an isotropic g factor.
inline constexpr double electron_gamma(double g) { return -g * kBohrRadPerMsGauss; }

} // namespace gcce::units
