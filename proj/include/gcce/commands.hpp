#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gcce/cce.hpp"
#include "gcce/config.hpp"
#include "gcce/fit.hpp"
#include "gcce/structure.hpp"

namespace gcce {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::string out_dir;                // empty: write nothing
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int workers = 1;
    std::ostream* log = nullptr;
};

SpeciesRegistry registry_for(const SimulationConfig& config);
// Central system with qubit levels selected from the configured labels.
CentralSystem central_from_config(const SimulationConfig& config, const SpeciesRegistry& registry, const Vec3& position);
// Everything the ensemble engine needs; t_max_ms of the config sets the grid.
EnsembleProblem problem_from_config(const SimulationConfig& config, int workers);

// Random spins of the given species in a cube of side `box` centred on the origin,
// at least min_separation apart and from the origin.
std::vector<BathSpin> synthetic_bath(int n, double box, const SpinSpecies& species, std::uint64_t seed,
                                     double min_separation = 1.5);

struct SimulationResult {
    CoherenceCurve curve;
    std::optional<StretchedExpFit> fit;
    std::string fit_error;
    double t_max_ms = 0.0; // grid actually used
};

// Runs the ensemble and fits; rescales t_max up to config.max_extensions times
// when the curve does not decay below 0.9 or decays within the first tenth of the grid.
SimulationResult simulate_with_fit(const SimulationConfig& config, int workers, std::ostream* log = nullptr);

struct ResultRecord {
    std::string config_echo;
    SimulationResult result;
    double wall_time_s = 0.0;
    std::string version = kVersion;
};

ResultRecord cmd_simulate(const SimulationConfig& config, const RunOptions& options);

struct CrossoverResult {
    double target_us = 0.0;
    double concentration = 0.0; // fraction
    double molar_mM = 0.0;      // 0 when no structure is available
};

struct SweepReport {
    ConcentrationScan scan;
    std::vector<CrossoverResult> crossovers;
    std::vector<std::string> failures;
    std::vector<double> betas;
};

SweepReport cmd_sweep_concentration(const SimulationConfig& config, const RunOptions& options);

struct CpmgReport {
    std::vector<PulsePoint> points;
    std::vector<double> betas;
    PowerLawFit power_law;
    bool has_power_law = false;
    std::vector<std::string> failures;
};

CpmgReport cmd_cpmg_scan(const SimulationConfig& config, const RunOptions& options);

struct VerifyReport {
    std::vector<double> max_deviation; // index k: order k+1
    std::size_t n_spins = 0;
    bool passed = false;
};

inline constexpr double kVerifyTolerance = 1e-8;

VerifyReport cmd_verify(const SimulationConfig& config, const RunOptions& options);

StretchedExpFit cmd_fit(const SimulationConfig& config, const RunOptions& options);

} // namespace gcce
