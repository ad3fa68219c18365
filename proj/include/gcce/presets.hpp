#pragma once

#include <map>
#include <string>
#include <vector>

#include "gcce/config.hpp"

namespace gcce {

struct ConvergenceSettings {
    int order = 2;
    double r_dipole = 8.0;
    double r_bath = 20.0;
    int n_realizations = 1;
    double t_max_ms = 0.05;
};

// Published reference value kept verbatim as text.
struct ExpectedValue {
    std::string key;
    std::string value;
    std::string unit;
    double rel_tolerance = 0.0;
    std::string source;

    double number() const;
};

struct PresetBundle {
    std::string name;
    double g_perp = 2.0023;
    double g_par = 2.0023;
    char unique_axis = 'z'; // lab axis carrying g_par and A_par
    std::string nucleus;    // species name of the qubit's own nucleus
    double nuclear_spin = 0.5;
    double a_perp_mhz = 0.0;
    double a_par_mhz = 0.0;
    double p_mhz = 0.0;
    double field_tesla = 0.33;
    std::vector<double> qubit_levels{-0.5, -0.5, 0.5, -0.5};
    std::string surrogate_structure; // file name inside the preset directory
    int qubits_per_cell = 2;
    std::map<BathType, ConvergenceSettings> convergence;
    std::vector<ExpectedValue> expected;

    const ExpectedValue& expect(const std::string& key) const;
    Vec3 g_diag() const;
    Vec3 hyperfine_diag_mhz() const;
};

// votpp or cumnt; throws ConfigError otherwise.
PresetBundle load_preset(const std::string& name);

// Directory holding bundled preset files; GCCE_PRESET_DIR overrides the built-in location.
std::string preset_directory();

// Central parameters, structure and convergence settings for the given bath type.
void apply_preset(SimulationConfig& config, const PresetBundle& bundle, BathType bath_type);

} // namespace gcce
