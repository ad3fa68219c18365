#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcce/types.hpp"

namespace gcce {

enum class BathType { NuclearH, NuclearD, Electron, Mixed, Synthetic };
enum class ElectronMode { Free, Bound };

std::string to_string(BathType t);
BathType parse_bath_type(const std::string& s);

// Flat `key = value` run description. Lists are whitespace separated.
struct SimulationConfig {
    std::string preset;    // votpp, cumnt or empty
    std::string structure; // extended XYZ path, relative to the config file
    std::string species;   // optional species registry path
    int qubits_per_cell = 0; // 0: count qubit-element atoms in the cell

    // Central system.
    std::string central_nucleus = "none"; // species name or none
    Vec3 g_diag{2.0023, 2.0023, 2.0023};
    Vec3 hyperfine_mhz{0.0, 0.0, 0.0};    // principal values along x, y, z
    double quadrupole_mhz = 0.0;
    Vec3 field_gauss{0.0, 0.0, 3300.0};
    std::vector<double> qubit_levels{-0.5, -0.5, 0.5, -0.5}; // ms0 mi0 ms1 mi1

    // Bath.
    BathType bath_type = BathType::NuclearH;
    ElectronMode electron_mode = ElectronMode::Free;
    double r_bath = 20.0;
    double r_dipole = 8.0;
    int order = 2;
    double concentration = 0.02;
    int n_realizations = 1;
    int n_meanfield_samples = 8;
    bool mean_field = true;
    std::string bath_state = "mixed"; // mixed, sampled
    std::string central_coupling = "full"; // full, ising, none
    bool bath_bath = true;
    int synthetic_spins = 4;
    double synthetic_box = 10.0;

    // Sequence and grid.
    std::string sequence = "hahn"; // fid, hahn, cpmg
    int n_pulses = 1;
    std::string pulse_axis = "y";
    double t_max_ms = 0.05;
    int n_points = 101;
    int max_extensions = 4; // t_max doublings allowed when the curve has not decayed
    std::uint64_t seed = 1;
    int dim_cap = 4096;
    long cluster_cap = 20000000;

    // Scans.
    std::vector<double> concentrations;
    std::vector<std::string> sweep_curves; // optional precomputed curves, one per concentration
    std::vector<double> crossover_targets_us;
    std::vector<double> pulse_counts;
    std::string input_curve; // for the fit command

    // Directory used to resolve relative paths; not part of the echo.
    std::string base_dir;

    bool operator==(const SimulationConfig& other) const;
    std::string resolve(const std::string& path) const;
    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Keys are applied after the preset named by `preset`, if any.
SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::string& path);

// Every field, one per line, doubles at 17 significant digits.
std::string echo_config(const SimulationConfig& config);

} // namespace gcce
