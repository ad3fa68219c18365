#include "gcce/exact.hpp"

#include <cmath>
#include <string>

#include "gcce/error.hpp"

namespace gcce {

namespace {

CMatrix qubit_pulse(const CMatrix& w, PulseAxis axis) {
    Eigen::Matrix2cd r;
    if (axis == PulseAxis::Y)
        r << 0.0, -1.0, 1.0, 0.0;
    else
        r << 0.0, Complex(0.0, -1.0), Complex(0.0, -1.0), 0.0;
    const auto dc = w.rows();
    return CMatrix::Identity(dc, dc) + w * (r - Eigen::Matrix2cd::Identity()) * w.adjoint();
}

// Tr_bath[(<0| x 1) rho (|1> x 1)].
Complex qubit_coherence(const CMatrix& rho, const CMatrix& w, int db) {
    const CMatrix id = CMatrix::Identity(db, db);
    const CMatrix left = kron(w.col(0).adjoint(), id);
    const CMatrix right = kron(w.col(1), id);
    return (left * rho * right).trace();
}

} // namespace

ExactSystem ExactSystem::build(const CentralSystem& cs, std::span<const BathSpin> bath, const ExactOptions& options) {
    std::size_t dim = static_cast<std::size_t>(cs.dim());
    for (const auto& s : bath) dim *= static_cast<std::size_t>(spin_dimension(s.species.s));
    if (dim > options.dim_cap)
        throw ClusterTooLargeError("exact evolution needs dimension " + std::to_string(dim) + ", cap is " +
                                   std::to_string(options.dim_cap));
    CouplingOptions coupling = options.coupling;
    coupling.dim_cap = options.dim_cap;
    ExactSystem sys;
    sys.h = build_cluster_hamiltonian(cs, bath, {}, coupling);
    sys.central_dim = cs.dim();
    sys.bath_dim = static_cast<int>(dim) / cs.dim();
    const CentralBasis basis = central_basis(cs);
    sys.qubit_vectors.resize(cs.dim(), 2);
    sys.qubit_vectors.col(0) = basis.vectors.col(basis.level0);
    sys.qubit_vectors.col(1) = basis.vectors.col(basis.level1);
    return sys;
}

CMatrix exact_density_matrix(const ExactSystem& sys, const PulseSequence& seq, double t) {
    const int db = sys.bath_dim;
    const CMatrix& w = sys.qubit_vectors;
    const CVector psi = (w.col(0) + w.col(1)) * std::sqrt(0.5);
    CMatrix rho = kron(psi * psi.adjoint(), CMatrix::Identity(db, db) / static_cast<double>(db));
    const CMatrix pulse = kron(qubit_pulse(w, seq.axis), CMatrix::Identity(db, db));
    for (const auto& step : pulse_timings(seq, t)) {
        const CMatrix u = step.is_pulse ? pulse : expm_hermitian(sys.h, step.duration);
        rho = u * rho * u.adjoint();
    }
    return rho;
}

CoherenceCurve exact_coherence(const ExactSystem& sys, const PulseSequence& seq, const std::vector<double>& times,
                               ExactMethod method) {
    const int db = sys.bath_dim;
    const int dim = sys.h.dim();
    const CMatrix& w = sys.qubit_vectors;
    auto raw = [&](double t) -> Complex {
        if (method == ExactMethod::DensityMatrix) return qubit_coherence(exact_density_matrix(sys, seq, t), w, db);
        // Pure-state runs |psi> x |J>, one per bath basis state.
        CMatrix u = CMatrix::Identity(dim, dim);
        const CMatrix pulse = kron(qubit_pulse(w, seq.axis), CMatrix::Identity(db, db));
        for (const auto& step : pulse_timings(seq, t)) u = (step.is_pulse ? pulse : expm_hermitian(sys.h, step.duration)) * u;
        const CVector psi = (w.col(0) + w.col(1)) * std::sqrt(0.5);
        Complex sum = 0.0;
        for (int j = 0; j < db; ++j) {
            CVector e = CVector::Zero(db);
            e[j] = 1.0;
            const CVector state = u * kron(psi, e);
            // <0| Tr_b |state><state| |1> = sum_b <0,b|state> <state|1,b>.
            const CVector a0 = kron(w.col(0).adjoint(), CMatrix::Identity(db, db)) * state;
            const CVector a1 = kron(w.col(1).adjoint(), CMatrix::Identity(db, db)) * state;
            sum += a1.dot(a0);
        }
        return sum / static_cast<double>(db);
    };
    const Complex norm = raw(0.0);
    CoherenceCurve curve;
    curve.times = times;
    curve.values.reserve(times.size());
    for (double t : times) curve.values.push_back(raw(t) / norm);
    curve.meta.sequence = seq.label();
    return curve;
}

CoherenceCurve exact_coherence(const CentralSystem& cs, std::span<const BathSpin> bath, const PulseSequence& seq,
                               const std::vector<double>& times, const ExactOptions& options) {
    CoherenceCurve c = exact_coherence(ExactSystem::build(cs, bath, options), seq, times, options.method);
    c.meta.field = cs.field;
    c.meta.order = bath.size();
    return c;
}

ProjectedHamiltonians projected_hamiltonians(const HermitianMatrix& h, const CMatrix& qubit_vectors, int bath_dim, double tol) {
    const CMatrix& m = h.matrix();
    const CMatrix id = CMatrix::Identity(bath_dim, bath_dim);
    if (qubit_vectors.rows() * bath_dim != m.rows() || qubit_vectors.cols() != 2)
        throw ShapeError("projected_hamiltonians: qubit vectors do not match the Hamiltonian");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    std::array<CMatrix, 2> blocks;
    for (int q = 0; q < 2; ++q) {
        const CMatrix lift = kron(qubit_vectors.col(q), id);
        const CMatrix image = m * lift;
        blocks[q] = lift.adjoint() * image;
        const double leak = (image - lift * blocks[q]).cwiseAbs().maxCoeff();
        if (leak > tol * scale)
            throw NotPureDephasingError("Hamiltonian couples the qubit state to other central states (max element " +
                                        std::to_string(leak) + ")");
    }
    return {HermitianMatrix(blocks[0]), HermitianMatrix(blocks[1])};
}

CoherenceCurve overlap_coherence(const ExactSystem& sys, const PulseSequence& seq, const std::vector<double>& times) {
    const ProjectedHamiltonians ph = projected_hamiltonians(sys.h, sys.qubit_vectors, sys.bath_dim);
    const SpectralPropagator p0(ph.plus);
    const SpectralPropagator p1(ph.minus);
    const int db = sys.bath_dim;
    // Each branch flips at every pulse; U_end0 is the path that finishes in |0>.
    auto branch = [&](int start, double t) {
        CMatrix u = CMatrix::Identity(db, db);
        int state = start;
        for (const auto& step : pulse_timings(seq, t)) {
            if (step.is_pulse)
                state ^= 1;
            else
                u = (state == 0 ? p0 : p1).propagator(step.duration) * u;
        }
        return u;
    };
    const int n = seq.refocusing_pulses();
    auto raw = [&](double t) -> Complex {
        const CMatrix u0 = branch(n % 2, t);
        const CMatrix u1 = branch((n + 1) % 2, t);
        // Average over basis states J of <J| U1^dagger U0 |J>.
        return (u1.adjoint() * u0).trace() / static_cast<double>(db);
    };
    const Complex norm = raw(0.0);
    CoherenceCurve curve;
    curve.times = times;
    for (double t : times) curve.values.push_back(raw(t) / norm);
    curve.meta.sequence = seq.label();
    return curve;
}

} // namespace gcce
