#include "gcce/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gcce/error.hpp"

namespace gcce {

namespace {

struct Params {
    double log_t2 = 0.0;
    double beta = 1.0;
};

double clamp_beta(double b) { return std::clamp(b, 1e-3, kMaxBeta); }

double sum_sq(std::span<const double> t, std::span<const double> y, const Params& p) {
    const double t2 = std::exp(p.log_t2);
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - std::exp(-std::pow(t[i] / t2, p.beta));
        s += r * r;
    }
    return s;
}

// J^T J and J^T r for residual r = y - model.
void normal_equations(std::span<const double> t, std::span<const double> y, const Params& p, Eigen::Matrix2d& jtj,
                      Eigen::Vector2d& jtr) {
    jtj.setZero();
    jtr.setZero();
    const double t2 = std::exp(p.log_t2);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0.0) {
            continue;
        }
        const double x = t[i] / t2;
        const double xb = std::pow(x, p.beta);
        const double m = std::exp(-xb);
        // d model / d log_t2 and d model / d beta.
        const Eigen::Vector2d g(m * p.beta * xb, -m * xb * std::log(x));
        jtj += g * g.transpose();
        jtr += g * (y[i] - m);
    }
}

Params levenberg_marquardt(std::span<const double> t, std::span<const double> y, Params p) {
    double lambda = 1e-3;
    double cost = sum_sq(t, y, p);
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::Matrix2d jtj;
        Eigen::Vector2d jtr;
        normal_equations(t, y, p, jtj, jtr);
        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::Matrix2d a = jtj;
            a.diagonal() *= (1.0 + lambda);
            a.diagonal().array() += 1e-300;
            const Eigen::Vector2d step = a.ldlt().solve(jtr);
            Params trial{p.log_t2 + step[0], clamp_beta(p.beta + step[1])};
            const double c = sum_sq(t, y, trial);
            if (std::isfinite(c) && c <= cost) {
                const double change = std::abs(trial.log_t2 - p.log_t2) + std::abs(trial.beta - p.beta);
                const double gain = cost - c;
                p = trial;
                cost = c;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (change < 1e-14 || gain <= 1e-30) return p;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return p;
}

double initial_t2(std::span<const double> t, std::span<const double> y, double beta) {
    const double target = std::exp(-1.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (y[i] < target && y[i - 1] >= target) {
            const double f = (y[i - 1] - target) / (y[i - 1] - y[i]);
            return t[i - 1] + f * (t[i] - t[i - 1]);
        }
    }
    // No crossing: extrapolate from the last point.
    const double yl = std::clamp(y.back(), 1e-12, 0.999);
    return t.back() / std::pow(-std::log(yl), 1.0 / beta);
}

} // namespace

StretchedExpFit fit_stretched_exp(std::span<const double> times, std::span<const double> magnitude) {
    if (times.size() != magnitude.size()) throw ShapeError("times and magnitudes differ in length");
    if (times.size() < 8) throw InsufficientDecayError("stretched-exponential fit needs at least 8 points");
    if (*std::min_element(magnitude.begin(), magnitude.end()) >= 0.9)
        throw InsufficientDecayError("coherence never drops below 0.9; extend t_max");

    Params best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (double beta0 : {1.0, 2.0, 3.0}) {
        const double t2_0 = initial_t2(times, magnitude, beta0);
        if (!(t2_0 > 0.0) || !std::isfinite(t2_0)) continue;
        const Params p = levenberg_marquardt(times, magnitude, Params{std::log(t2_0), beta0});
        const double c = sum_sq(times, magnitude, p);
        if (c < best_cost) {
            best_cost = c;
            best = p;
        }
    }
    if (!std::isfinite(best_cost)) throw FitError("stretched-exponential fit failed to converge");

    StretchedExpFit fit;
    fit.t2 = std::exp(best.log_t2);
    fit.beta = best.beta;
    const auto n = static_cast<double>(times.size());
    fit.residual = std::sqrt(best_cost / n);
    Eigen::Matrix2d jtj;
    Eigen::Vector2d jtr;
    normal_equations(times, magnitude, best, jtj, jtr);
    const double s2 = n > 2 ? best_cost / (n - 2.0) : 0.0;
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(jtj);
    if (lu.isInvertible()) {
        const Eigen::Matrix2d cov = s2 * lu.inverse();
        fit.t2_stderr = fit.t2 * std::sqrt(std::max(0.0, cov(0, 0)));
        fit.beta_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    return fit;
}

StretchedExpFit fit_stretched_exp(const CoherenceCurve& curve) {
    const std::vector<double> m = curve.magnitude();
    return fit_stretched_exp(curve.times, m);
}

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw FitError("abscissae must not all coincide");
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    return l;
}

} // namespace

double ConcentrationScan::predict(double concentration) const {
    return std::pow(10.0, loglog_intercept + loglog_slope * std::log10(concentration));
}

ConcentrationScan fit_loglog(std::span<const ScanPoint> points) {
    if (points.size() < 3) throw FitError("log-log fit needs at least 3 points");
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (!(p.concentration > 0.0) || !(p.t2 > 0.0)) throw FitError("concentrations and T2 must be positive");
        x.push_back(std::log10(p.concentration));
        y.push_back(std::log10(p.t2));
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].concentration == points[j].concentration) throw FitError("duplicate concentration in scan");
    const Line l = least_squares(x, y);
    ConcentrationScan scan;
    scan.points.assign(points.begin(), points.end());
    scan.loglog_slope = l.slope;
    scan.loglog_intercept = l.intercept;
    return scan;
}

double solve_crossover(const ConcentrationScan& scan, double t2_target) {
    if (!(t2_target > 0.0)) throw FitError("crossover target must be positive");
    if (scan.loglog_slope == 0.0) throw FitError("flat log-log line has no crossover");
    return std::pow(10.0, (std::log10(t2_target) - scan.loglog_intercept) / scan.loglog_slope);
}

double PowerLawFit::predict(double n) const { return t2_0 * std::pow(n, p); }

PowerLawFit fit_power_law(std::span<const PulsePoint> points) {
    if (points.size() < 3) throw FitError("power-law fit needs at least 3 points");
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (p.n < 1.0) throw FitError("pulse counts must be at least 1");
        if (!(p.t2 > 0.0)) throw FitError("T2 values must be positive");
        x.push_back(std::log(p.n));
        y.push_back(std::log(p.t2));
    }
    const Line l = least_squares(x, y);
    return PowerLawFit{std::exp(l.intercept), l.slope};
}

} // namespace gcce
