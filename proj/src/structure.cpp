#include "gcce/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gcce/error.hpp"
#include "gcce/rng.hpp"
#include "gcce/spin_algebra.hpp"
#include "gcce/units.hpp"

namespace gcce {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_comment(std::string line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    return line;
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

void SpeciesRegistry::add(SpinSpecies species) {
    spin_dimension(species.s);
    if (species.abundance < 0.0 || species.abundance > 1.0)
        throw ConfigError("species " + species.name + ": abundance outside [0,1]");
    if (std::abs(species.s - 0.5) < 1e-12 && species.quadrupole_p != 0.0)
        throw ConfigError("species " + species.name + ": spin-1/2 cannot carry a quadrupole term");
    auto it = std::find_if(species_.begin(), species_.end(), [&](const auto& s) { return s.name == species.name; });
    if (it != species_.end())
        *it = std::move(species);
    else
        species_.push_back(std::move(species));
}

bool SpeciesRegistry::contains(const std::string& name) const {
    return std::any_of(species_.begin(), species_.end(), [&](const auto& s) { return s.name == name; });
}

const SpinSpecies& SpeciesRegistry::find(const std::string& name) const {
    for (const auto& s : species_)
        if (s.name == name) return s;
    throw UnknownSpeciesError("unknown species '" + name + "'");
}

SpeciesRegistry SpeciesRegistry::defaults(double electron_g) {
    SpeciesRegistry reg;
    reg.add({"H", 0.5, 26.7522, 0.0, 1.0});
    reg.add({"D", 1.0, 4.1065, 0.0, 1.0});
    reg.add({"C13", 0.5, 6.7283, 0.0, 0.0107});
    reg.add({"N14", 1.0, 1.9338, 0.0, 0.99636});
    reg.add({"e", 0.5, units::electron_gamma(electron_g), 0.0, 1.0});
    // Nuclear magnetons of 7.6227 and 7.624 MHz/T with g_N 1.46837 and 1.484.
    reg.add({"V51", 3.5, units::gamma_from_magneton(1.46837, 7.6227), units::mhz_to_rad_per_ms(-0.35), 0.9975});
    reg.add({"Cu63", 1.5, units::gamma_from_magneton(1.484, 7.624), units::mhz_to_rad_per_ms(9.45), 0.6915});
    return reg;
}

SpeciesRegistry parse_species_registry(const std::string& text) {
    SpeciesRegistry reg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_comment(line);
        if (blank(line)) continue;
        std::istringstream fields(line);
        SpinSpecies sp;
        double quad_mhz = 0.0;
        if (!(fields >> sp.name >> sp.s >> sp.gamma >> quad_mhz >> sp.abundance))
            throw ParseError("expected `name s gamma quadrupole_MHz abundance`", lineno);
        std::string extra;
        if (fields >> extra) throw ParseError("trailing field '" + extra + "'", lineno);
        sp.quadrupole_p = units::mhz_to_rad_per_ms(quad_mhz);
        try {
            reg.add(sp);
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return reg;
}

SpeciesRegistry load_species_registry(const std::string& path) { return parse_species_registry(read_file(path)); }

double UnitCell::volume() const { return std::abs(lattice.determinant()); }

Vec3 UnitCell::cartesian(const Vec3& fractional) const { return lattice.transpose() * fractional; }

Vec3 UnitCell::qubit_position() const { return cartesian(atoms.at(qubit_site).fractional); }

const std::string& UnitCell::qubit_element() const { return atoms.at(qubit_site).element; }

UnitCell parse_structure(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!blank(line)) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError("empty structure file", 0);
    long count = 0;
    {
        std::istringstream f(line);
        if (!(f >> count) || count <= 0) throw ParseError("first line must be a positive atom count", lineno);
    }

    if (!next_line()) throw ParseError("missing lattice header", lineno + 1);
    UnitCell cell;
    {
        const auto key = line.find("Lattice=\"");
        if (key == std::string::npos) throw ParseError("missing Lattice=\"...\" header", lineno);
        const auto start = key + 9;
        const auto end = line.find('"', start);
        if (end == std::string::npos) throw ParseError("unterminated Lattice string", lineno);
        std::istringstream f(line.substr(start, end - start));
        double v[9];
        for (double& x : v)
            if (!(f >> x)) throw ParseError("Lattice needs 9 numbers", lineno);
        cell.lattice << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        if (cell.volume() < 1e-9) throw ParseError("lattice vectors are linearly dependent", lineno);

        const auto qkey = line.find("qubit_index=");
        if (qkey == std::string::npos) throw ParseError("missing qubit_index=K", lineno);
        std::istringstream q(line.substr(qkey + 12));
        if (!(q >> cell.qubit_site)) throw ParseError("qubit_index must be an integer", lineno);
    }

    const Mat3 to_frac = cell.lattice.transpose().inverse();
    for (long i = 0; i < count; ++i) {
        if (!next_line()) throw ParseError("expected " + std::to_string(count) + " atoms, found " + std::to_string(i), lineno + 1);
        std::istringstream f(line);
        Atom atom;
        Vec3 r;
        if (!(f >> atom.element >> r.x() >> r.y() >> r.z())) throw ParseError("expected `Element x y z`", lineno);
        Vec3 frac = to_frac * r;
        for (int k = 0; k < 3; ++k) {
            frac[k] -= std::floor(frac[k]);
            if (frac[k] >= 1.0) frac[k] = 0.0;
        }
        atom.fractional = frac;
        cell.atoms.push_back(std::move(atom));
    }
    if (cell.qubit_site < 0 || cell.qubit_site >= static_cast<int>(cell.atoms.size()))
        throw ParseError("qubit_index out of range", 2);
    return cell;
}

UnitCell load_structure(const std::string& path) {
    try {
        return parse_structure(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line());
    }
}

std::vector<BathSpin> build_bath(const UnitCell& cell, double r_bath, const BathFilter& filter, const Vec3& center) {
    if (!(r_bath > 0.0)) throw ConfigError("r_bath must be positive");
    // Image range along each axis from the reciprocal vector lengths.
    const Mat3 recip = cell.lattice.inverse();
    int reach[3];
    for (int k = 0; k < 3; ++k) reach[k] = static_cast<int>(std::ceil(r_bath * recip.col(k).norm())) + 1;
    const Vec3 center_frac = cell.lattice.transpose().inverse() * center;
    int origin[3];
    for (int k = 0; k < 3; ++k) origin[k] = static_cast<int>(std::floor(center_frac[k]));

    std::vector<std::pair<double, BathSpin>> found;
    for (const auto& atom : cell.atoms) {
        auto it = filter.find(atom.element);
        if (it == filter.end()) continue;
        for (int i = origin[0] - reach[0]; i <= origin[0] + reach[0]; ++i)
            for (int j = origin[1] - reach[1]; j <= origin[1] + reach[1]; ++j)
                for (int l = origin[2] - reach[2]; l <= origin[2] + reach[2]; ++l) {
                    const Vec3 pos = cell.cartesian(atom.fractional + Vec3(i, j, l));
                    const double dist = (pos - center).norm();
                    if (dist > r_bath || dist < 1e-6) continue;
                    BathSpin spin;
                    spin.position = pos;
                    spin.species = it->second;
                    found.emplace_back(dist, std::move(spin));
                }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const Vec3& p = a.second.position;
        const Vec3& q = b.second.position;
        return std::tie(p.x(), p.y(), p.z()) < std::tie(q.x(), q.y(), q.z());
    });
    std::vector<BathSpin> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

std::vector<BathSpin> substitute_isotope(std::span<const BathSpin> bath, const SpinSpecies& from, const SpinSpecies& to) {
    if (from.name.empty() || to.name.empty()) throw UnknownSpeciesError("isotope substitution needs named species");
    std::vector<BathSpin> out(bath.begin(), bath.end());
    for (auto& spin : out)
        if (spin.species.name == from.name) spin.species = to;
    return out;
}

std::vector<Vec3> qubit_sites(const UnitCell& cell, double r_bath) {
    BathFilter filter{{cell.qubit_element(), SpinSpecies{"site", 0.5, 0.0, 0.0, 1.0}}};
    std::vector<Vec3> sites;
    for (const auto& spin : build_bath(cell, r_bath, filter, cell.qubit_position())) sites.push_back(spin.position);
    return sites;
}

BathRealization sample_electron_bath(std::span<const Vec3> sites, double f, std::uint64_t seed, const SpinSpecies& electron) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("concentration must lie in [0,1]");
    BathRealization r;
    r.seed = seed;
    r.concentration = f;
    Rng rng(seed);
    for (const auto& site : sites) {
        if (rng.uniform() < f) {
            BathSpin spin;
            spin.position = site;
            spin.species = electron;
            r.spins.push_back(std::move(spin));
        }
    }
    return r;
}

double concentration_to_molar(double f, const UnitCell& cell, int qubits_per_cell) {
    const double volume = cell.volume();
    if (!(volume > 0.0)) throw ConfigError("cell volume must be positive");
    // 1 A^3 = 1e-27 L.
    const double molar = f * qubits_per_cell / (volume * 1.0e-27 * units::kAvogadro);
    return molar * 1.0e3;
}

} // namespace gcce
