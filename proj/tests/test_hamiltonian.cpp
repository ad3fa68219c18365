#include <doctest.h>

#include <cmath>

#include "gcce/error.hpp"
#include "gcce/hamiltonian.hpp"
#include "gcce/units.hpp"
#include "helpers.hpp"

using namespace gcce;

namespace {

// mu0/4pi * hbar * gamma1 * gamma2 / r^3 in rad/ms, from SI constants.
double dipolar_prefactor_si(double gamma1_rad_per_ms_g, double gamma2_rad_per_ms_g, double r_angstrom) {
    const double mu0_4pi = 1e-7;
    const double hbar = 1.054571817e-34;
    // rad ms^-1 G^-1 -> rad s^-1 T^-1.
    const double g1 = gamma1_rad_per_ms_g * 1e7;
    const double g2 = gamma2_rad_per_ms_g * 1e7;
    const double r = r_angstrom * 1e-10;
    return mu0_4pi * hbar * g1 * g2 / (r * r * r) * 1e-3;
}

Mat3 dipole_oracle(const Vec3& r1, const Vec3& r2, double g1, double g2) {
    const Vec3 d = r2 - r1;
    const Vec3 n = d.normalized();
    return -dipolar_prefactor_si(g1, g2, d.norm()) * (3.0 * n * n.transpose() - Mat3::Identity());
}

struct Factors {
    std::vector<int> dims;
    std::vector<SpinOperators> ops;
    CMatrix op(std::size_t site, int axis) const { return embed(ops[site].component(axis), site, dims); }
};

} // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("proton pair coupling matches the hand-computed value") {
    const double g = 26.7522;
    const Mat3 t = dipole_tensor(Vec3::Zero(), Vec3(0, 0, 2), g, g).value;
    // 2 A apart along z: 94.35 rad/ms (15.0 kHz) perpendicular, twice that along the axis.
    CHECK(t(0, 0) == doctest::Approx(94.347).epsilon(2e-4));
    CHECK(t(1, 1) == doctest::Approx(94.347).epsilon(2e-4));
    CHECK(t(2, 2) == doctest::Approx(-2.0 * 94.347).epsilon(2e-4));
    CHECK(std::abs(t(0, 1)) < 1e-12);
    CHECK(units::rad_per_ms_to_mhz(t(0, 0)) * 1e3 == doctest::Approx(15.016).epsilon(1e-3));
}

TEST_CASE("dipole tensor is symmetric, traceless and matches the SI formula") {
    const Vec3 a(0.3, -1.0, 2.0), b(4.1, 2.2, -0.7);
    const double ge = units::electron_gamma(2.0023);
    const Mat3 t = dipole_tensor(a, b, ge, 26.7522).value;
    CHECK((t - t.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(t.trace()) < 1e-9 * t.cwiseAbs().maxCoeff());
    const Mat3 oracle = dipole_oracle(a, b, ge, 26.7522);
    CHECK((t - oracle).cwiseAbs().maxCoeff() < 1e-6 * oracle.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(dipole_tensor(a, a, 1.0, 1.0), SingularityError);
}

TEST_CASE("free-electron central Hamiltonian splits by g muB B") {
    const CentralSystem cs = testing::free_electron(3000.0);
    const HermitianMatrix h = build_central_hamiltonian(cs);
    REQUIRE(h.dim() == 2);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    const double split = es.eigenvalues()[1] - es.eigenvalues()[0];
    CHECK(units::rad_per_ms_to_mhz(split) == doctest::Approx(2.0023 * 1.39962449361 * 3000.0).epsilon(1e-12));
}

TEST_CASE("hybrid central Hamiltonian with hyperfine and quadrupole terms") {
    CentralSystem cs = testing::free_electron(3300.0);
    const SpinSpecies v{"V51", 3.5, 7.032734, 0.0, 1.0};
    OwnNucleus n;
    n.species = v;
    n.hyperfine = Vec3(-473, -166, -166).asDiagonal();
    n.hyperfine *= units::kMHz;
    n.quadrupole_p = units::mhz_to_rad_per_ms(-0.35);
    cs.own_nucleus = n;
    cs.g_tensor = Vec3(1.968, 1.984, 1.984).asDiagonal();
    const HermitianMatrix h = build_central_hamiltonian(cs);
    REQUIRE(h.dim() == 16);

    // Independent construction.
    Factors f{{2, 8}, {spin_operators(0.5), spin_operators(3.5)}};
    CMatrix ref = CMatrix::Zero(16, 16);
    for (int a = 0; a < 3; ++a) {
        ref += units::kBohrRadPerMsGauss * (cs.field.transpose() * cs.g_tensor)(a) * f.op(0, a);
        ref -= v.gamma * cs.field[a] * f.op(1, a);
        for (int b = 0; b < 3; ++b) ref += n.hyperfine(a, b) * f.op(0, a) * f.op(1, b);
    }
    ref += n.quadrupole_p * f.op(1, 2) * f.op(1, 2);
    CHECK(testing::max_abs_diff(h.matrix(), ref) < 1e-8 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("qubit level selection follows the product-state labels") {
    CentralSystem cs = testing::free_electron(3300.0);
    OwnNucleus n;
    n.species = SpinSpecies{"Cu63", 1.5, 7.108806, 0.0, 1.0};
    n.hyperfine = Vec3(118, 118, 500).asDiagonal();
    n.hyperfine *= units::kMHz;
    cs.own_nucleus = n;
    const HermitianMatrix h = build_central_hamiltonian(cs);
    const auto [i0, i1] = select_qubit_levels(h, cs, {LevelLabel{-0.5, 0.5}, LevelLabel{0.5, 0.5}});
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    // |m_s, m_I> product index: electron outer, nucleus inner, m descending.
    const int p0 = 1 * 4 + 1;
    const int p1 = 0 * 4 + 1;
    CHECK(std::norm(es.eigenvectors()(p0, i0)) > 0.9);
    CHECK(std::norm(es.eigenvectors()(p1, i1)) > 0.9);
}

TEST_CASE("empty cluster without mean field equals the central Hamiltonian") {
    const CentralSystem cs = testing::free_electron();
    const HermitianMatrix hc = build_central_hamiltonian(cs);
    const HermitianMatrix hk = build_cluster_hamiltonian(cs, {}, {});
    CHECK(testing::max_abs_diff(hc.matrix(), hk.matrix()) < 1e-12);
}

TEST_CASE("one bath spin doubles the dimension and carries the dipolar block") {
    const CentralSystem cs = testing::free_electron();
    const BathSpin b = testing::spin_at(Vec3(1.0, 2.0, 3.0));
    const HermitianMatrix h = build_cluster_hamiltonian(cs, std::span(&b, 1), {});
    REQUIRE(h.dim() == 4);
    const Mat3 t = dipole_oracle(Vec3::Zero(), b.position, cs.dipolar_gamma(), 26.7522);
    // <up,up|H|up,up> - <up,down|H|up,down> = 2 * (1/2)(1/2) T_zz contribution minus nuclear Zeeman.
    const Factors f{{2, 2}, {spin_operators(0.5), spin_operators(0.5)}};
    CMatrix ref = units::kBohrRadPerMsGauss * 2.0023 * cs.field.z() * f.op(0, 2) - 26.7522 * cs.field.z() * f.op(1, 2);
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) ref += t(a, c) * f.op(0, a) * f.op(1, c);
    CHECK(testing::max_abs_diff(h.matrix(), ref) < 1e-8 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("frozen third spin matches the projected explicit three-spin Hamiltonian") {
    const CentralSystem cs = testing::free_electron();
    const std::vector<BathSpin> cluster = {testing::spin_at(Vec3(2.0, 0.5, 1.0)), testing::spin_at(Vec3(-1.0, 2.5, 0.3))};
    const BathSpin frozen = testing::spin_at(Vec3(0.5, -2.0, 1.5));
    const double m = 0.5;
    const MeanFieldSpin mf{frozen, m};
    const HermitianMatrix h = build_cluster_hamiltonian(cs, cluster, std::span(&mf, 1));

    // Explicit central x 3 spins; couplings to the frozen spin kept secular (z z) since
    // only the field component along B survives as a mean field.
    const Factors f{{2, 2, 2, 2}, {spin_operators(0.5), spin_operators(0.5), spin_operators(0.5), spin_operators(0.5)}};
    const double g = 26.7522, b = cs.field.z();
    const std::vector<Vec3> pos = {cluster[0].position, cluster[1].position, frozen.position};
    CMatrix full = units::kBohrRadPerMsGauss * 2.0023 * b * f.op(0, 2);
    for (int i = 0; i < 3; ++i) {
        full -= g * b * f.op(i + 1, 2);
        const Mat3 a = dipole_oracle(Vec3::Zero(), pos[i], cs.dipolar_gamma(), g);
        if (i == 2) {
            full += a(2, 2) * f.op(0, 2) * f.op(3, 2);
        } else {
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) full += a(p, q) * f.op(0, p) * f.op(i + 1, q);
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Mat3 jt = dipole_oracle(pos[i], pos[j], g, g);
            if (j == 2) {
                full += jt(2, 2) * f.op(i + 1, 2) * f.op(j + 1, 2);
            } else {
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) full += jt(p, q) * f.op(i + 1, p) * f.op(j + 1, q);
            }
        }
    // Block with the frozen spin (last factor) at m = +1/2, i.e. even indices.
    CMatrix block(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) block(r, c) = full(2 * r, 2 * c);
    block += g * b * m * CMatrix::Identity(8, 8); // frozen spin's own Zeeman energy
    CHECK(testing::max_abs_diff(h.matrix(), block) < 1e-8 * block.cwiseAbs().maxCoeff());
}

TEST_CASE("mean-field spins must be disjoint from the cluster") {
    const CentralSystem cs = testing::free_electron();
    const BathSpin b = testing::spin_at(Vec3(1.0, 1.0, 1.0));
    const MeanFieldSpin mf{b, 0.5};
    CHECK_THROWS_AS(build_cluster_hamiltonian(cs, std::span(&b, 1), std::span(&mf, 1)), ConfigError);
}

TEST_CASE("ising coupling keeps only the zz element") {
    Mat3 t;
    t << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const Mat3 ising = project_central_coupling(t, CentralCoupling::Ising);
    CHECK(ising(2, 2) == 9.0);
    CHECK(ising.cwiseAbs().sum() == 9.0);
    CHECK(project_central_coupling(t, CentralCoupling::Full) == t);
    CHECK(project_central_coupling(t, CentralCoupling::None).isZero());
}

TEST_CASE("dimension cap is enforced") {
    const CentralSystem cs = testing::free_electron();
    std::vector<BathSpin> cluster;
    for (int i = 0; i < 5; ++i) cluster.push_back(testing::spin_at(Vec3(1.0 + i, 0.0, 0.0)));
    CouplingOptions opts;
    opts.dim_cap = 32;
    CHECK_THROWS_AS(build_cluster_hamiltonian(cs, cluster, {}, opts), ClusterTooLargeError);
}

}
