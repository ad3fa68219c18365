#include <doctest.h>

#include <cmath>
#include <random>

#include "gcce/error.hpp"
#include "gcce/fit.hpp"

using namespace gcce;

namespace {

void stretched(double t2, double beta, double t_max, int n, std::vector<double>& t, std::vector<double>& y) {
    t.clear();
    y.clear();
    for (int i = 0; i < n; ++i) {
        t.push_back(t_max * i / (n - 1));
        y.push_back(std::exp(-std::pow(t.back() / t2, beta)));
    }
}

} // namespace

TEST_SUITE("analysis-fit") {

TEST_CASE("stretched exponential recovers its generator") {
    std::vector<double> t, y;
    stretched(0.010, 2.2, 0.03, 101, t, y);
    const auto f = fit_stretched_exp(t, y);
    CHECK(f.t2 == doctest::Approx(0.010).epsilon(1e-3));
    CHECK(f.beta == doctest::Approx(2.2).epsilon(1e-3));
    CHECK(f.residual < 1e-8);
}

TEST_CASE("recovery across stretch factors and four decades of T2") {
    for (double beta : {0.8, 1.0, 1.5, 2.2, 3.0})
        for (double t2 : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
            std::vector<double> t, y;
            stretched(t2, beta, 3.0 * t2, 101, t, y);
            const auto f = fit_stretched_exp(t, y);
            CHECK(f.t2 == doctest::Approx(t2).epsilon(1e-3));
            CHECK(f.beta == doctest::Approx(beta).epsilon(1e-3));
        }
}

TEST_CASE("noisy data gives finite standard errors covering the truth") {
    std::vector<double> t, y;
    stretched(0.05, 1.7, 0.15, 81, t, y);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.005);
    for (auto& v : y) v += noise(rng);
    const auto f = fit_stretched_exp(t, y);
    CHECK(f.t2_stderr > 0.0);
    CHECK(f.beta_stderr > 0.0);
    CHECK(std::abs(f.t2 - 0.05) < 5 * f.t2_stderr);
    CHECK(std::abs(f.beta - 1.7) < 5 * f.beta_stderr);
}

TEST_CASE("curves that do not decay are rejected") {
    std::vector<double> t, y;
    stretched(1.0, 2.0, 0.1, 30, t, y);
    CHECK_THROWS_AS(fit_stretched_exp(t, y), InsufficientDecayError);
    stretched(0.01, 2.0, 0.1, 5, t, y);
    CHECK_THROWS_AS(fit_stretched_exp(t, y), InsufficientDecayError);
}

TEST_CASE("curve overload fits the magnitude") {
    CoherenceCurve c;
    for (int i = 0; i < 41; ++i) {
        const double t = 0.04 * i / 40;
        c.times.push_back(t);
        c.values.push_back(std::polar(std::exp(-std::pow(t / 0.012, 2.0)), 0.3 * i));
    }
    const auto f = fit_stretched_exp(c);
    CHECK(f.t2 == doctest::Approx(0.012).epsilon(1e-3));
    CHECK(f.beta == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("log-log fit of T2 proportional to 1/c") {
    std::vector<ScanPoint> pts;
    for (double c : {0.02, 0.05, 0.1, 0.2, 0.5}) pts.push_back({c, 5e-6 / c});
    const auto scan = fit_loglog(pts);
    CHECK(scan.loglog_slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(scan.loglog_intercept == doctest::Approx(std::log10(5e-6)).epsilon(1e-12));
    CHECK(scan.predict(0.01) == doctest::Approx(5e-4).epsilon(1e-12));
    CHECK(solve_crossover(scan, 0.01) == doctest::Approx(5e-4).epsilon(1e-12));
}

TEST_CASE("log-log recovery for arbitrary slopes") {
    for (double m : {-2.5, -1.3, -0.4, 0.7}) {
        std::vector<ScanPoint> pts;
        for (double c : {1e-4, 1e-3, 1e-2, 1e-1}) pts.push_back({c, std::pow(10.0, 0.3 + m * std::log10(c))});
        const auto scan = fit_loglog(pts);
        CHECK(scan.loglog_slope == doctest::Approx(m).epsilon(1e-10));
        CHECK(scan.loglog_intercept == doctest::Approx(0.3).epsilon(1e-10));
    }
}

TEST_CASE("flat scans and degenerate input") {
    const std::vector<ScanPoint> flat = {{0.1, 1.0}, {0.2, 1.0}, {0.4, 1.0}};
    const auto scan = fit_loglog(flat);
    CHECK(scan.loglog_slope == doctest::Approx(0.0));
    CHECK_THROWS_AS(solve_crossover(scan, 0.5), FitError);
    CHECK_THROWS_AS(fit_loglog(std::vector<ScanPoint>{{0.1, 1.0}, {0.2, 0.5}}), FitError);
    CHECK_THROWS_AS(fit_loglog(std::vector<ScanPoint>{{0.1, 1.0}, {0.1, 0.5}, {0.3, 0.2}}), FitError);
    CHECK_THROWS_AS(fit_loglog(std::vector<ScanPoint>{{0.1, 1.0}, {0.2, -0.5}, {0.3, 0.2}}), FitError);
}

TEST_CASE("power law recovers exponent and prefactor") {
    for (double p : {0.67, 0.91, 0.97, 1.0}) {
        std::vector<PulsePoint> pts;
        for (double n : {1.0, 2.0, 4.0, 8.0, 16.0}) pts.push_back({n, 6.7e-3 * std::pow(n, p)});
        const auto fit = fit_power_law(pts);
        CHECK(fit.p == doctest::Approx(p).epsilon(1e-12));
        CHECK(fit.t2_0 == doctest::Approx(6.7e-3).epsilon(1e-12));
        CHECK(fit.predict(2048) == doctest::Approx(6.7e-3 * std::pow(2048.0, p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fit_power_law(std::vector<PulsePoint>{{1, 1.0}, {2, 2.0}}), FitError);
    CHECK_THROWS_AS(fit_power_law(std::vector<PulsePoint>{{0.5, 1.0}, {2, 2.0}, {4, 3.0}}), FitError);
}

}
