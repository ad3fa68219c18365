#pragma once

#include <span>
#include <vector>

#include "gcce/cce.hpp"
#include "gcce/hamiltonian.hpp"
#include "gcce/pulse.hpp"
#include "gcce/spin_algebra.hpp"

namespace gcce {

enum class ExactMethod {
    DensityMatrix, // propagate rho = |psi><psi| x 1/d
    BasisAverage,  // average pure-state runs over bath basis states
};

struct ExactOptions {
    CouplingOptions coupling;
    ExactMethod method = ExactMethod::DensityMatrix;
    std::size_t dim_cap = 4096;
};

// Full central x bath system in the product basis.
struct ExactSystem {
    HermitianMatrix h;
    int central_dim = 1;
    int bath_dim = 1;
    CMatrix qubit_vectors; // central_dim x 2, columns |0>, |1>

    // Throws ClusterTooLargeError naming the required dimension.
    static ExactSystem build(const CentralSystem& cs, std::span<const BathSpin> bath, const ExactOptions& options = {});
};

// Full density matrix at total time t.
CMatrix exact_density_matrix(const ExactSystem& sys, const PulseSequence& seq, double t);

CoherenceCurve exact_coherence(const CentralSystem& cs, std::span<const BathSpin> bath, const PulseSequence& seq,
                               const std::vector<double>& times, const ExactOptions& options = {});
CoherenceCurve exact_coherence(const ExactSystem& sys, const PulseSequence& seq, const std::vector<double>& times,
                               ExactMethod method = ExactMethod::DensityMatrix);

struct ProjectedHamiltonians {
    HermitianMatrix plus;  // bath Hamiltonian conditioned on |0>
    HermitianMatrix minus; // conditioned on |1>
};

// Conditional bath Hamiltonians for the two qubit states. Throws
// NotPureDephasingError when H connects either qubit state to any other central state.
ProjectedHamiltonians projected_hamiltonians(const HermitianMatrix& h, const CMatrix& qubit_vectors, int bath_dim,
                                             double tol = 1e-9);

// Coherence as the overlap of the two conditionally evolved bath states,
// averaged over bath basis states. Requires a pure-dephasing Hamiltonian.
CoherenceCurve overlap_coherence(const ExactSystem& sys, const PulseSequence& seq, const std::vector<double>& times);

} // namespace gcce
