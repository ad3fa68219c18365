#include "gcce/hamiltonian.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gcce/error.hpp"
#include "gcce/units.hpp"

namespace gcce {

int CentralSystem::electron_dim() const { return spin_dimension(electron_spin); }

int CentralSystem::nucleus_dim() const { return own_nucleus ? spin_dimension(own_nucleus->species.s) : 1; }

double CentralSystem::dipolar_gamma() const { return units::electron_gamma(g_tensor.trace() / 3.0); }

CouplingTensor dipole_tensor(const Vec3& r1, const Vec3& r2, double gamma1, double gamma2) {
    const Vec3 d = r2 - r1;
    const double r = d.norm();
    if (r < 1e-9) throw SingularityError("dipole_tensor: coincident positions");
    const Vec3 n = d / r;
    const double prefactor = units::kHbarMu0Over4Pi * gamma1 * gamma2 / (r * r * r);
    CouplingTensor t;
    t.value = -prefactor * (3.0 * n * n.transpose() - Mat3::Identity());
    return t;
}

CentralOperators central_operators(const CentralSystem& cs) {
    const SpinOperators e = spin_operators(cs.electron_spin);
    const int de = e.dim();
    const int dn = cs.nucleus_dim();
    const std::array<int, 2> dims{de, dn};

    CentralOperators ops;
    for (int a = 0; a < 3; ++a) ops.s[a] = embed(e.component(a), 0, dims);

    const int d = de * dn;
    CMatrix h = CMatrix::Zero(d, d);
    // Electron Zeeman mu_B B . g . S and zero-field splitting S . D . S.
    const Vec3 bg = units::kBohrRadPerMsGauss * (cs.field.transpose() * cs.g_tensor).transpose();
    for (int a = 0; a < 3; ++a) {
        h += bg[a] * ops.s[a];
        for (int b = 0; b < 3; ++b)
            if (cs.zfs(a, b) != 0.0) h += cs.zfs(a, b) * ops.s[a] * ops.s[b];
    }
    if (cs.own_nucleus) {
        const auto& nuc = *cs.own_nucleus;
        const SpinOperators n = spin_operators(nuc.species.s);
        std::array<CMatrix, 3> iops;
        for (int a = 0; a < 3; ++a) iops[a] = embed(n.component(a), 1, dims);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b)
                if (nuc.hyperfine(a, b) != 0.0) h += nuc.hyperfine(a, b) * ops.s[a] * iops[b];
            h -= nuc.species.gamma * cs.field[a] * iops[a];
        }
        h += nuc.quadrupole_p * iops[2] * iops[2];
    }
    ops.h = h;
    return ops;
}

HermitianMatrix build_central_hamiltonian(const CentralSystem& cs) { return HermitianMatrix(central_operators(cs).h); }

std::pair<int, int> select_qubit_levels(const HermitianMatrix& h, const CentralSystem& cs,
                                        const std::pair<LevelLabel, LevelLabel>& target) {
    if (h.dim() != cs.dim()) throw ShapeError("select_qubit_levels: Hamiltonian does not match central dimension");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    const Eigen::VectorXd& values = solver.eigenvalues();
    const CMatrix& vectors = solver.eigenvectors();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());

    auto product_index = [&](const LevelLabel& label) {
        const int ie = level_index(cs.electron_spin, label.ms);
        if (!cs.own_nucleus) return ie;
        return ie * cs.nucleus_dim() + level_index(cs.own_nucleus->species.s, label.mi);
    };

    auto pick = [&](const LevelLabel& label) {
        const int p = product_index(label);
        int best = 0;
        double best_overlap = -1.0;
        for (int k = 0; k < h.dim(); ++k) {
            const double ov = std::norm(vectors(p, k));
            if (ov > best_overlap) {
                best_overlap = ov;
                best = k;
            }
        }
        if (best_overlap <= 0.5)
            throw LevelIdentificationError("no eigenvector overlaps the requested product state by more than 1/2");
        for (int k = 0; k < h.dim(); ++k)
            if (k != best && std::abs(values(k) - values(best)) < 1e-9 * scale)
                throw LevelIdentificationError("requested level is degenerate; assignment is ambiguous");
        return best;
    };

    const int a = pick(target.first);
    const int b = pick(target.second);
    if (a == b) throw LevelIdentificationError("both labels resolve to the same eigenvector");
    return {a, b};
}

CentralBasis central_basis(const CentralSystem& cs) {
    const auto [l0, l1] = cs.qubit_levels;
    if (l0 < 0 || l1 < 0 || l0 >= cs.dim() || l1 >= cs.dim() || l0 == l1)
        throw ConfigError("central system has no valid qubit levels selected");
    const CentralOperators ops = central_operators(cs);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(ops.h);
    CentralBasis basis;
    basis.energies = solver.eigenvalues();
    basis.vectors = solver.eigenvectors();
    const CMatrix& v = basis.vectors;
    basis.rotated.h = basis.energies.cast<Complex>().asDiagonal();
    for (int a = 0; a < 3; ++a) basis.rotated.s[a] = v.adjoint() * ops.s[a] * v;
    basis.level0 = l0;
    basis.level1 = l1;
    basis.dipolar_gamma = cs.dipolar_gamma();
    basis.field = cs.field;
    basis.position = cs.position;
    return basis;
}

Mat3 project_central_coupling(const Mat3& tensor, CentralCoupling mode) {
    switch (mode) {
    case CentralCoupling::Full: return tensor;
    case CentralCoupling::Ising: {
        Mat3 out = Mat3::Zero();
        out(2, 2) = tensor(2, 2);
        return out;
    }
    case CentralCoupling::None: return Mat3::Zero();
    }
    return tensor;
}

CMatrix assemble_cluster_hamiltonian(const CentralOperators& central, const Vec3& central_position, double central_gamma,
                                     const Vec3& field, std::span<const BathSpin> cluster, const Vec3& central_mean_field,
                                     std::span<const Vec3> member_mean_fields, const CouplingOptions& options) {
    const Eigen::Index dc = central.h.rows();
    std::vector<int> dims;
    std::vector<SpinOperators> spin_ops;
    std::size_t d = 1;
    for (const auto& spin : cluster) {
        spin_ops.push_back(spin_operators(spin.species.s));
        dims.push_back(spin_ops.back().dim());
        d *= static_cast<std::size_t>(dims.back());
        if (d * static_cast<std::size_t>(dc) > options.dim_cap)
            throw ClusterTooLargeError("cluster Hilbert space exceeds dimension cap of " + std::to_string(options.dim_cap));
    }
    if (member_mean_fields.size() != cluster.size() && !member_mean_fields.empty())
        throw ShapeError("mean-field list does not match cluster size");

    const auto nd = static_cast<Eigen::Index>(d);
    std::vector<std::array<CMatrix, 3>> iops(cluster.size());
    for (std::size_t i = 0; i < cluster.size(); ++i)
        for (int a = 0; a < 3; ++a) iops[i][a] = embed(spin_ops[i].component(a), i, dims);

    // Bath-only part and the operators multiplying S_a.
    CMatrix hbath = CMatrix::Zero(nd, nd);
    std::array<CMatrix, 3> coupled;
    for (int a = 0; a < 3; ++a) coupled[a] = CMatrix::Zero(nd, nd);
    // Mean fields keep only their component along the applied field.
    const Vec3 axis = field.norm() > 0.0 ? Vec3(field.normalized()) : Vec3::UnitZ();
    Vec3 central_static = axis * axis.dot(central_mean_field);

    for (std::size_t i = 0; i < cluster.size(); ++i) {
        const BathSpin& spin = cluster[i];
        Vec3 h = spin.local_field;
        if (!member_mean_fields.empty()) h += axis * axis.dot(member_mean_fields[i]);
        if (spin.zeeman_tensor)
            h += (field.transpose() * *spin.zeeman_tensor).transpose();
        else
            h -= spin.species.gamma * field;
        for (int a = 0; a < 3; ++a)
            if (h[a] != 0.0) hbath += h[a] * iops[i][a];
        if (spin.species.quadrupole_p != 0.0) hbath += spin.species.quadrupole_p * iops[i][2] * iops[i][2];

        const Mat3 a_tensor = project_central_coupling(
            dipole_tensor(central_position, spin.position, central_gamma, spin.species.gamma).value, options.central);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a_tensor(a, b) != 0.0) coupled[a] += a_tensor(a, b) * iops[i][b];

        if (!options.bath_bath) continue;
        for (std::size_t j = i + 1; j < cluster.size(); ++j) {
            const Mat3 jt = dipole_tensor(spin.position, cluster[j].position, spin.species.gamma, cluster[j].species.gamma).value;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) hbath += jt(a, b) * iops[i][a] * iops[j][b];
        }
    }

    const CMatrix id_bath = CMatrix::Identity(nd, nd);
    CMatrix hc = central.h;
    for (int a = 0; a < 3; ++a)
        if (central_static[a] != 0.0) hc += central_static[a] * central.s[a];
    CMatrix out = kron(hc, id_bath);
    out += kron(CMatrix::Identity(dc, dc), hbath);
    for (int a = 0; a < 3; ++a)
        if (!cluster.empty()) out += kron(central.s[a], coupled[a]);
    return out;
}

HermitianMatrix build_cluster_hamiltonian(const CentralSystem& cs, std::span<const BathSpin> cluster,
                                          std::span<const MeanFieldSpin> mean_field, const CouplingOptions& options) {
    const double gamma_c = cs.dipolar_gamma();
    for (const auto& mf : mean_field)
        for (const auto& c : cluster)
            if ((mf.spin.position - c.position).norm() < 1e-9)
                throw ConfigError("mean-field spins must be disjoint from the cluster");

    Vec3 central_mf = Vec3::Zero();
    std::vector<Vec3> member_mf(cluster.size(), Vec3::Zero());
    for (const auto& mf : mean_field) {
        const Vec3 m(0.0, 0.0, mf.iz);
        const Mat3 a = project_central_coupling(
            dipole_tensor(cs.position, mf.spin.position, gamma_c, mf.spin.species.gamma).value, options.central);
        central_mf += a * m;
        if (!options.bath_bath) continue;
        for (std::size_t i = 0; i < cluster.size(); ++i)
            member_mf[i] +=
                dipole_tensor(cluster[i].position, mf.spin.position, cluster[i].species.gamma, mf.spin.species.gamma).value * m;
    }
    return HermitianMatrix(
        assemble_cluster_hamiltonian(central_operators(cs), cs.position, gamma_c, cs.field, cluster, central_mf, member_mf, options));
}

} // namespace gcce
