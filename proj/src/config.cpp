#include "gcce/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gcce/error.hpp"
#include "gcce/presets.hpp"

namespace gcce {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

long to_long(const std::string& key, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    if (!text.empty() && text[0] == '-') throw ConfigError(key + ": expected a non-negative integer");
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0') throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
    if (text == "false" || text == "no" || text == "0" || text == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& w : words(text)) out.push_back(to_double(key, w));
    return out;
}

Vec3 to_vec3(const std::string& key, const std::string& text) {
    const auto v = to_doubles(key, text);
    if (v.size() != 3) throw ConfigError(key + ": expected three numbers");
    return {v[0], v[1], v[2]};
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
    return out;
}

std::string join(const Vec3& v) { return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]); }

struct Field {
    const char* key;
    std::function<void(SimulationConfig&, const std::string&)> set;
    std::function<std::string(const SimulationConfig&)> get;
};

#define GCCE_STR(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = v; }, [](const SimulationConfig& c) { return c.name; } }
#define GCCE_DBL(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
            [](const SimulationConfig& c) { return fmt(c.name); } }
#define GCCE_INT(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = static_cast<decltype(c.name)>(to_long(#name, v)); }, \
            [](const SimulationConfig& c) { return std::to_string(c.name); } }
#define GCCE_BOOL(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = to_bool(#name, v); }, \
            [](const SimulationConfig& c) { return std::string(c.name ? "true" : "false"); } }
#define GCCE_VEC3(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = to_vec3(#name, v); }, \
            [](const SimulationConfig& c) { return join(c.name); } }
#define GCCE_LIST(name) \
    Field { #name, [](SimulationConfig& c, const std::string& v) { c.name = to_doubles(#name, v); }, \
            [](const SimulationConfig& c) { return join(c.name); } }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        GCCE_STR(preset),
        GCCE_STR(structure),
        GCCE_STR(species),
        GCCE_INT(qubits_per_cell),
        GCCE_STR(central_nucleus),
        GCCE_VEC3(g_diag),
        GCCE_VEC3(hyperfine_mhz),
        GCCE_DBL(quadrupole_mhz),
        GCCE_VEC3(field_gauss),
        GCCE_LIST(qubit_levels),
        Field{"bath_type", [](SimulationConfig& c, const std::string& v) { c.bath_type = parse_bath_type(v); },
              [](const SimulationConfig& c) { return to_string(c.bath_type); }},
        Field{"electron_mode",
              [](SimulationConfig& c, const std::string& v) {
                  if (v == "free")
                      c.electron_mode = ElectronMode::Free;
                  else if (v == "bound")
                      c.electron_mode = ElectronMode::Bound;
                  else
                      throw ConfigError("electron_mode: expected free or bound, got '" + v + "'");
              },
              [](const SimulationConfig& c) { return std::string(c.electron_mode == ElectronMode::Free ? "free" : "bound"); }},
        GCCE_DBL(r_bath),
        GCCE_DBL(r_dipole),
        GCCE_INT(order),
        GCCE_DBL(concentration),
        GCCE_INT(n_realizations),
        GCCE_INT(n_meanfield_samples),
        GCCE_BOOL(mean_field),
        GCCE_STR(bath_state),
        GCCE_STR(central_coupling),
        GCCE_BOOL(bath_bath),
        GCCE_INT(synthetic_spins),
        GCCE_DBL(synthetic_box),
        GCCE_STR(sequence),
        GCCE_INT(n_pulses),
        GCCE_STR(pulse_axis),
        GCCE_DBL(t_max_ms),
        GCCE_INT(n_points),
        GCCE_INT(max_extensions),
        Field{"seed", [](SimulationConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
              [](const SimulationConfig& c) { return std::to_string(c.seed); }},
        GCCE_INT(dim_cap),
        GCCE_INT(cluster_cap),
        GCCE_LIST(concentrations),
        Field{"sweep_curves", [](SimulationConfig& c, const std::string& v) { c.sweep_curves = words(v); },
              [](const SimulationConfig& c) { return join(c.sweep_curves); }},
        GCCE_LIST(crossover_targets_us),
        GCCE_LIST(pulse_counts),
        GCCE_STR(input_curve),
    };
    return table;
}

#undef GCCE_STR
#undef GCCE_DBL
#undef GCCE_INT
#undef GCCE_BOOL
#undef GCCE_VEC3
#undef GCCE_LIST

} // namespace

std::string to_string(BathType t) {
    switch (t) {
    case BathType::NuclearH: return "nuclear-H";
    case BathType::NuclearD: return "nuclear-D";
    case BathType::Electron: return "electron";
    case BathType::Mixed: return "mixed";
    case BathType::Synthetic: return "synthetic";
    }
    return "?";
}

BathType parse_bath_type(const std::string& s) {
    for (auto t : {BathType::NuclearH, BathType::NuclearD, BathType::Electron, BathType::Mixed, BathType::Synthetic})
        if (to_string(t) == s) return t;
    throw ConfigError("bath_type: unknown value '" + s + "'");
}

bool SimulationConfig::operator==(const SimulationConfig& other) const { return echo_config(*this) == echo_config(other); }

std::string SimulationConfig::resolve(const std::string& path) const {
    if (path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

void SimulationConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(r_bath > 0.0, "r_bath must be positive");
    require(r_dipole > 0.0, "r_dipole must be positive");
    require(order >= 1, "order must be at least 1");
    require(concentration >= 0.0 && concentration <= 1.0, "concentration must lie in [0, 1]");
    require(n_realizations >= 1, "n_realizations must be at least 1");
    require(n_meanfield_samples >= 1, "n_meanfield_samples must be at least 1");
    require(n_points >= 2, "n_points must be at least 2");
    require(t_max_ms > 0.0, "t_max_ms must be positive");
    require(max_extensions >= 0, "max_extensions must be non-negative");
    require(dim_cap >= 2, "dim_cap must be at least 2");
    require(cluster_cap >= 1, "cluster_cap must be positive");
    require(qubit_levels.size() == 4, "qubit_levels needs four numbers: ms0 mi0 ms1 mi1");
    require(sequence == "fid" || sequence == "hahn" || sequence == "cpmg", "sequence must be fid, hahn or cpmg");
    require(sequence != "cpmg" || n_pulses >= 1, "n_pulses must be at least 1 for cpmg");
    require(pulse_axis == "x" || pulse_axis == "y", "pulse_axis must be x or y");
    require(central_coupling == "full" || central_coupling == "ising" || central_coupling == "none",
            "central_coupling must be full, ising or none");
    require(bath_state == "mixed" || bath_state == "sampled", "bath_state must be mixed or sampled");
    require(qubits_per_cell >= 0, "qubits_per_cell must be non-negative");
    require(synthetic_spins >= 1, "synthetic_spins must be at least 1");
    require(synthetic_box > 0.0, "synthetic_box must be positive");
    for (double c : concentrations) require(c > 0.0 && c <= 1.0, "concentrations must lie in (0, 1]");
    for (double n : pulse_counts) require(n >= 1.0, "pulse_counts must be at least 1");
    for (double t : crossover_targets_us) require(t > 0.0, "crossover_targets_us must be positive");
    require(sweep_curves.empty() || sweep_curves.size() == concentrations.size(),
            "sweep_curves must list one file per concentration");
}

SimulationConfig parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& f : fields()) known = known || key == f.key;
        if (!known) throw ParseError("unknown key '" + key + "'", lineno);
        if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
        seen[key] = lineno;
        entries.emplace_back(key, value);
    }

    SimulationConfig cfg;
    auto value_of = [&](const std::string& key) -> const std::string* {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    };
    if (const auto* p = value_of("preset"); p && !p->empty()) {
        const BathType bt = value_of("bath_type") ? parse_bath_type(*value_of("bath_type")) : cfg.bath_type;
        apply_preset(cfg, load_preset(*p), bt);
    }
    for (const auto& [key, value] : entries) {
        for (const auto& f : fields()) {
            if (key != f.key) continue;
            try {
                f.set(cfg, value);
            } catch (const ParseError&) {
                throw;
            } catch (const ConfigError& e) {
                throw ParseError(e.what(), seen[key]);
            }
        }
    }
    cfg.validate();
    return cfg;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    SimulationConfig cfg = parse_config(ss.str());
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

std::string echo_config(const SimulationConfig& config) {
    std::string out;
    for (const auto& f : fields()) {
        const std::string v = f.get(config);
        out += std::string(f.key) + " =" + (v.empty() ? "" : " " + v) + "\n";
    }
    return out;
}

} // namespace gcce
