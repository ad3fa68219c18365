#include "gcce/presets.hpp"

#include <cstdlib>
#include <filesystem>

#include "gcce/error.hpp"

#ifndef GCCE_SOURCE_DIR
#define GCCE_SOURCE_DIR "."
#endif

namespace gcce {

double ExpectedValue::number() const { return std::stod(value); }

const ExpectedValue& PresetBundle::expect(const std::string& key) const {
    for (const auto& e : expected)
        if (e.key == key) return e;
    throw ConfigError("preset " + name + " has no expected value '" + key + "'");
}

Vec3 PresetBundle::g_diag() const {
    Vec3 g = Vec3::Constant(g_perp);
    g[unique_axis - 'x'] = g_par;
    return g;
}

Vec3 PresetBundle::hyperfine_diag_mhz() const {
    Vec3 a = Vec3::Constant(a_perp_mhz);
    a[unique_axis - 'x'] = a_par_mhz;
    return a;
}

std::string preset_directory() {
    if (const char* env = std::getenv("GCCE_PRESET_DIR"); env && *env) return env;
    return (std::filesystem::path(GCCE_SOURCE_DIR) / "presets").string();
}

namespace {

PresetBundle votpp() {
    PresetBundle b;
    b.name = "votpp";
    b.g_perp = 1.984;
    b.g_par = 1.968;
    // Field perpendicular to the V=O bond: the bond, and with it the unique axis, lies along x.
    b.unique_axis = 'x';
    b.nucleus = "V51";
    b.nuclear_spin = 3.5;
    b.a_perp_mhz = -166.0;
    b.a_par_mhz = -473.0;
    b.p_mhz = -0.35;
    b.field_tesla = 0.33;
    b.surrogate_structure = "votpp_surrogate.xyz";
    b.qubits_per_cell = 2;
    b.convergence[BathType::Electron] = {3, 40.0, 90.0, 50, 0.002};
    b.convergence[BathType::NuclearH] = {2, 8.0, 20.0, 1, 0.05};
    b.convergence[BathType::NuclearD] = {2, 6.0, 20.0, 1, 0.5};
    b.convergence[BathType::Mixed] = {2, 8.0, 20.0, 1, 0.05};
    b.expected = {
        {"t2_electron_2pct", "0.35", "us", 0.40, "VO(TPP) electron bath at 2%, Hahn echo, CCE3, 50 realizations"},
        {"beta_electron_2pct", "0.92", "", 0.0, "VO(TPP) electron bath at 2%, stretch factor"},
        {"t2_electron_2pct_free", "0.17", "us", 0.0, "VO(TPP) electron bath at 2%, free-electron qubit"},
        {"t2_hydrogen", "10.88", "us", 0.25, "VO(TPP) hydrogen bath, Hahn echo, CCE2"},
        {"beta_hydrogen", "2.2", "", 0.0, "VO(TPP) hydrogen bath, stretch factor"},
        {"t2_deuterium", "127", "us", 0.30, "VO(TPP) deuterium bath, Hahn echo, CCE2"},
        {"beta_deuterium", "1.69", "", 0.0, "VO(TPP) deuterium bath, stretch factor"},
        {"t2_experiment_2pct", "1", "us", 0.0, "VO(TPP) measured Hahn echo at 2%"},
        {"t2_extrapolated_2pct", "0.26", "us", 0.0, "VO(TPP) log-log line evaluated at 2%"},
        {"crossover_hydrogen", "0.049", "%", 0.0, "VO(TPP) electron/hydrogen crossover concentration"},
        {"crossover_hydrogen_mM", "1.1", "mM", 0.0, "VO(TPP) electron/hydrogen crossover molarity"},
        {"crossover_deuterium", "0.004", "%", 0.0, "VO(TPP) electron/deuterium crossover concentration"},
        {"crossover_deuterium_mM", "0.09", "mM", 0.0, "VO(TPP) electron/deuterium crossover molarity"},
        {"molarity_2pct", "44.65", "mM", 0.0, "VO(TPP) molarity at 2%"},
    };
    return b;
}

PresetBundle cumnt() {
    PresetBundle b;
    b.name = "cumnt";
    b.g_perp = 2.0227;
    b.g_par = 2.0925;
    b.unique_axis = 'z';
    b.nucleus = "Cu63";
    b.nuclear_spin = 1.5;
    b.a_perp_mhz = 118.0;
    b.a_par_mhz = 500.0;
    b.p_mhz = 9.45;
    b.field_tesla = 0.33;
    b.surrogate_structure = "cumnt_surrogate.xyz";
    b.qubits_per_cell = 2;
    b.convergence[BathType::Electron] = {3, 40.0, 90.0, 50, 0.002};
    b.convergence[BathType::NuclearH] = {2, 8.0, 25.0, 1, 0.04};
    b.convergence[BathType::NuclearD] = {2, 8.0, 20.0, 1, 0.4};
    b.convergence[BathType::Mixed] = {2, 8.0, 25.0, 1, 0.04};
    b.expected = {
        {"t2_hydrogen", "8.6", "us", 0.25, "[Cu(mnt)2]2- hydrogen bath, Hahn echo, CCE2"},
        {"beta_hydrogen", "2.2", "", 0.0, "[Cu(mnt)2]2- hydrogen bath, stretch factor"},
        {"t2_deuterium", "100", "us", 0.0, "[Cu(mnt)2]2- deuterium bath, Hahn echo, CCE2"},
        {"beta_deuterium", "1.5", "", 0.0, "[Cu(mnt)2]2- deuterium bath, stretch factor"},
        {"t2_electron_0.001pct", "797", "us", 0.0, "[Cu(mnt)2]2- electron bath extrapolated to 0.001%"},
        {"t2_electron_0.01pct", "80", "us", 0.0, "[Cu(mnt)2]2- electron bath extrapolated to 0.01%"},
        {"t2_experiment_0.001pct_H", "9.23", "us", 0.0, "[Cu(mnt)2]2- measured, 0.001% protonated"},
        {"t2_experiment_0.01pct_D", "68", "us", 0.0, "[Cu(mnt)2]2- measured, 0.01% deuterated"},
        {"crossover_hydrogen", "0.093", "%", 0.0, "[Cu(mnt)2]2- electron/hydrogen crossover concentration"},
        {"crossover_hydrogen_mM", "1.4", "mM", 0.0, "[Cu(mnt)2]2- electron/hydrogen crossover molarity"},
        {"crossover_deuterium", "0.008", "%", 0.0, "[Cu(mnt)2]2- electron/deuterium crossover concentration"},
        {"molarity_0.01pct", "0.15", "mM", 0.0, "[Cu(mnt)2]2- molarity at 0.01%"},
        {"cpmg_hydrogen_t2_0", "6.7", "us", 0.0, "[Cu(mnt)2]2- CPMG power law, hydrogen bath"},
        {"cpmg_hydrogen_p", "0.97", "", 0.0, "[Cu(mnt)2]2- CPMG power law, hydrogen bath"},
        {"cpmg_electron_0.3pct_t2_0", "0.38", "us", 0.0, "[Cu(mnt)2]2- CPMG power law, electron bath 0.3%"},
        {"cpmg_electron_0.3pct_p", "0.91", "", 0.0, "[Cu(mnt)2]2- CPMG power law, electron bath 0.3%"},
        {"cpmg_electron_0.008pct_t2_0", "14.69", "us", 0.0, "[Cu(mnt)2]2- CPMG power law, electron bath 0.008%"},
        {"cpmg_electron_0.008pct_p", "0.91", "", 0.0, "[Cu(mnt)2]2- CPMG power law, electron bath 0.008%"},
        {"cpmg_experiment_t2_0", "5.2", "us", 0.0, "[Cu(mnt)2]2- measured CPMG power law"},
        {"cpmg_experiment_p", "0.67", "", 0.0, "[Cu(mnt)2]2- measured CPMG power law"},
        {"cpmg_hydrogen_t2_2048", "10.66", "ms", 0.0, "[Cu(mnt)2]2- hydrogen bath, CPMG-2048"},
        {"cpmg_electron_0.008pct_t2_2048", "15.61", "ms", 0.0, "[Cu(mnt)2]2- electron bath 0.008%, CPMG-2048"},
    };
    return b;
}

} // namespace

PresetBundle load_preset(const std::string& name) {
    if (name == "votpp") return votpp();
    if (name == "cumnt") return cumnt();
    throw ConfigError("unknown preset '" + name + "' (expected votpp or cumnt)");
}

void apply_preset(SimulationConfig& config, const PresetBundle& bundle, BathType bath_type) {
    config.preset = bundle.name;
    config.structure = (std::filesystem::path(preset_directory()) / bundle.surrogate_structure).string();
    config.qubits_per_cell = bundle.qubits_per_cell;
    config.central_nucleus = bundle.nucleus;
    config.g_diag = bundle.g_diag();
    config.hyperfine_mhz = bundle.hyperfine_diag_mhz();
    config.quadrupole_mhz = bundle.p_mhz;
    config.field_gauss = Vec3(0.0, 0.0, bundle.field_tesla * 1.0e4);
    config.qubit_levels = bundle.qubit_levels;
    config.bath_type = bath_type;
    if (auto it = bundle.convergence.find(bath_type); it != bundle.convergence.end()) {
        config.order = it->second.order;
        config.r_dipole = it->second.r_dipole;
        config.r_bath = it->second.r_bath;
        config.n_realizations = it->second.n_realizations;
        config.t_max_ms = it->second.t_max_ms;
    }
    if (bath_type == BathType::Electron) {
        config.n_meanfield_samples = 1;
        config.concentration = 0.02;
        // Bath electrons are unlike spins: secular coupling to the qubit only.
        config.central_coupling = "ising";
    }
}

} // namespace gcce
