#pragma once

#include <span>
#include <vector>

#include "gcce/cce.hpp"

namespace gcce {

// |L(t)| ~ exp(-(t/T2)^beta)
struct StretchedExpFit {
    double t2 = 0.0;   // ms
    double beta = 1.0;
    double residual = 0.0; // RMS
    double t2_stderr = 0.0;
    double beta_stderr = 0.0;
};

inline constexpr double kMaxBeta = 4.0;

// Throws InsufficientDecayError with fewer than 8 points or when |L| never drops below 0.9.
StretchedExpFit fit_stretched_exp(std::span<const double> times, std::span<const double> magnitude);
StretchedExpFit fit_stretched_exp(const CoherenceCurve& curve);

struct ScanPoint {
    double concentration = 0.0; // fraction
    double t2 = 0.0;            // ms
};

struct ConcentrationScan {
    std::vector<ScanPoint> points;
    double loglog_slope = 0.0;
    double loglog_intercept = 0.0;

    // T2 predicted by the fitted line.
    double predict(double concentration) const;
};

// Least squares of log10 T2 against log10 c; needs at least 3 distinct concentrations.
ConcentrationScan fit_loglog(std::span<const ScanPoint> points);

// Concentration at which the fitted line reaches t2_target.
double solve_crossover(const ConcentrationScan& scan, double t2_target);

struct PulsePoint {
    double n = 1.0;
    double t2 = 0.0; // ms
};

// T2(n) = t2_0 * n^p
struct PowerLawFit {
    double t2_0 = 0.0;
    double p = 0.0;

    double predict(double n) const;
};

PowerLawFit fit_power_law(std::span<const PulsePoint> points);

} // namespace gcce
