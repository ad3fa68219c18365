#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcce/types.hpp"

namespace gcce {

struct SpinSpecies {
    std::string name;
    double s = 0.5;
    double gamma = 0.0;        // rad ms^-1 G^-1, signed
    double quadrupole_p = 0.0; // rad/ms, coefficient of I_z^2
    double abundance = 1.0;

    bool operator==(const SpinSpecies&) const = default;
};

class SpeciesRegistry {
public:
    void add(SpinSpecies species);
    bool contains(const std::string& name) const;
    // Throws UnknownSpeciesError.
    const SpinSpecies& find(const std::string& name) const;
    const std::vector<SpinSpecies>& all() const { return species_; }

    // H, D, C13, N14, e (free electron with the given g), V51, Cu63.
    static SpeciesRegistry defaults(double electron_g);

private:
    std::vector<SpinSpecies> species_;
};

// `name s gamma_rad_per_ms_G quadrupole_MHz abundance` per line, '#' comments.
SpeciesRegistry parse_species_registry(const std::string& text);
SpeciesRegistry load_species_registry(const std::string& path);

struct Atom {
    std::string element;
    Vec3 fractional = Vec3::Zero(); // wrapped into [0,1)
};

struct UnitCell {
    Mat3 lattice = Mat3::Identity(); // rows are the a, b, c vectors in Angstrom
    std::vector<Atom> atoms;
    int qubit_site = 0;

    double volume() const;
    Vec3 cartesian(const Vec3& fractional) const;
    Vec3 qubit_position() const;
    const std::string& qubit_element() const;
};

// Extended XYZ: atom count, `Lattice="ax ay az bx by bz cx cy cz" qubit_index=K`
// (K zero-based), then `Element x y z` in Cartesian Angstrom.
UnitCell parse_structure(const std::string& text);
UnitCell load_structure(const std::string& path);

struct BathSpin {
    Vec3 position = Vec3::Zero();
    SpinSpecies species;
    // When set, Zeeman term is B . tensor . I (rad ms^-1 G^-1) instead of -gamma B . I.
    std::optional<Mat3> zeeman_tensor;
    // Static field h (rad/ms) entering as h . I.
    Vec3 local_field = Vec3::Zero();
};

struct BathRealization {
    std::vector<BathSpin> spins;
    std::uint64_t seed = 0;
    double concentration = 1.0;
};

// Element label -> species assigned to every matching atom.
using BathFilter = std::map<std::string, SpinSpecies>;

// All periodic images of filtered atoms within r_bath of center, the center
// itself excluded, ordered by distance then lexicographic position.
std::vector<BathSpin> build_bath(const UnitCell& cell, double r_bath, const BathFilter& filter, const Vec3& center);

// Swaps species on every spin whose species name equals from.name.
std::vector<BathSpin> substitute_isotope(std::span<const BathSpin> bath, const SpinSpecies& from, const SpinSpecies& to);

// Positions of all qubit-element images within r_bath of the central qubit (center excluded).
std::vector<Vec3> qubit_sites(const UnitCell& cell, double r_bath);

// Independent Bernoulli occupation of each site with probability f.
BathRealization sample_electron_bath(std::span<const Vec3> sites, double f, std::uint64_t seed,
                                     const SpinSpecies& electron);

// Qubit concentration in mmol/L for fraction f of the qubit sites occupied.
double concentration_to_molar(double f, const UnitCell& cell, int qubits_per_cell);

} // namespace gcce
