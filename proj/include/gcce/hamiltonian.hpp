#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "gcce/spin_algebra.hpp"
#include "gcce/structure.hpp"
#include "gcce/types.hpp"

namespace gcce {

struct OwnNucleus {
    SpinSpecies species;
    Mat3 hyperfine = Mat3::Zero(); // rad/ms
    double quadrupole_p = 0.0;      // rad/ms, coefficient of I_z^2
};

// The qubit: an electron spin, optionally hybridized with its own nucleus.
// Basis ordering is electron (outer) x nucleus (inner), m descending in each.
struct CentralSystem {
    double electron_spin = 0.5;
    Mat3 g_tensor = Mat3::Identity() * 2.0023;
    std::optional<OwnNucleus> own_nucleus;
    Mat3 zfs = Mat3::Zero(); // rad/ms
    Vec3 field = Vec3::Zero(); // Gauss
    Vec3 position = Vec3::Zero(); // Angstrom
    std::pair<int, int> qubit_levels{-1, -1};

    int electron_dim() const;
    int nucleus_dim() const;
    int dim() const { return electron_dim() * nucleus_dim(); }
    // Signed gyromagnetic ratio from the isotropic part of g; used for point-dipole couplings.
    double dipolar_gamma() const;
};

struct CouplingTensor {
    Mat3 value = Mat3::Zero(); // rad/ms
};

// Point-dipole coupling between spins at r1 and r2 (Angstrom) with signed
// gyromagnetic ratios in rad ms^-1 G^-1. Throws SingularityError when r1 == r2.
CouplingTensor dipole_tensor(const Vec3& r1, const Vec3& r2, double gamma1, double gamma2);

HermitianMatrix build_central_hamiltonian(const CentralSystem& cs);

// Product-state label |m_s, m_I>; m_I is ignored when there is no own nucleus.
struct LevelLabel {
    double ms = -0.5;
    double mi = -0.5;
};

// Indices (ascending-energy order) of the eigenvectors best matching the two labels.
std::pair<int, int> select_qubit_levels(const HermitianMatrix& h, const CentralSystem& cs,
                                        const std::pair<LevelLabel, LevelLabel>& target);

enum class CentralCoupling {
    Full,  // S . A . I
    Ising, // S_z A_zz I_z only
    None,
};

struct CouplingOptions {
    CentralCoupling central = CentralCoupling::Full;
    bool bath_bath = true;
    std::size_t dim_cap = 4096;
};

struct MeanFieldSpin {
    BathSpin spin;
    double iz = 0.0;
};

// Central x cluster Hamiltonian in the product basis, with frozen spins
// entering as static fields on the central spin and on each cluster member.
HermitianMatrix build_cluster_hamiltonian(const CentralSystem& cs, std::span<const BathSpin> cluster,
                                          std::span<const MeanFieldSpin> mean_field, const CouplingOptions& options = {});

// Central Hamiltonian and electron spin operators expressed in some basis of the central space.
struct CentralOperators {
    CMatrix h;
    std::array<CMatrix, 3> s;
};

CentralOperators central_operators(const CentralSystem& cs);

// Eigenbasis of the central Hamiltonian with the selected qubit levels.
struct CentralBasis {
    Eigen::VectorXd energies;
    CMatrix vectors;           // columns are eigenvectors in the product basis
    CentralOperators rotated;  // operators in the eigenbasis
    int level0 = 0;
    int level1 = 1;
    double dipolar_gamma = 0.0;
    Vec3 field = Vec3::Zero();
    Vec3 position = Vec3::Zero();
};

// Requires cs.qubit_levels to be set (distinct, in range).
CentralBasis central_basis(const CentralSystem& cs);

Mat3 project_central_coupling(const Mat3& tensor, CentralCoupling mode);

// Assembly used by both the public builder and the CCE engine: central
// operators in any basis, per-member static fields already summed. Mean
// fields are projected onto the applied field direction.
CMatrix assemble_cluster_hamiltonian(const CentralOperators& central, const Vec3& central_position, double central_gamma,
                                     const Vec3& field, std::span<const BathSpin> cluster, const Vec3& central_mean_field,
                                     std::span<const Vec3> member_mean_fields, const CouplingOptions& options);

} // namespace gcce
