#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gcce/cce.hpp"
#include "gcce/error.hpp"
#include "gcce/exact.hpp"
#include "gcce/pulse.hpp"
#include "helpers.hpp"

using namespace gcce;

namespace {

std::vector<BathSpin> proton_cloud(int n, double box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-box / 2, box / 2);
    std::vector<BathSpin> out;
    while (static_cast<int>(out.size()) < n) {
        const Vec3 r(u(rng), u(rng), u(rng));
        if (r.norm() < 2.0) continue;
        bool ok = true;
        for (const auto& s : out) ok = ok && (s.position - r).norm() > 1.5;
        if (ok) out.push_back(testing::spin_at(r));
    }
    return out;
}

double max_dev(const ComplexCurve& a, const ComplexCurve& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// <0| Tr_bath rho(t) |1> by direct density-matrix propagation of a given Hamiltonian.
ComplexCurve density_matrix_oracle(const HermitianMatrix& h, const CentralSystem& cs, int bath_dim, const PulseSequence& seq,
                                   const std::vector<double>& times) {
    const HermitianMatrix hc = build_central_hamiltonian(cs);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hc.matrix());
    const int dc = hc.dim();
    const CVector q0 = es.eigenvectors().col(cs.qubit_levels.first);
    const CVector q1 = es.eigenvectors().col(cs.qubit_levels.second);
    const CVector psi = (q0 + q1) / std::sqrt(2.0);
    const CMatrix id_b = CMatrix::Identity(bath_dim, bath_dim);
    const CMatrix rho0 = kron(psi * psi.adjoint(), id_b / static_cast<double>(bath_dim));
    // Ideal y pi pulse on the qubit pair.
    const CMatrix pc = CMatrix::Identity(dc, dc) - q0 * q0.adjoint() - q1 * q1.adjoint() - q0 * q1.adjoint() + q1 * q0.adjoint();
    const CMatrix pulse = kron(pc, id_b);
    ComplexCurve out;
    for (double t : times) {
        CMatrix rho = rho0;
        for (const auto& step : pulse_timings(seq, t)) {
            const CMatrix u = step.is_pulse ? pulse : testing::taylor_expm(h.matrix(), step.duration);
            rho = u * rho * u.adjoint();
        }
        Complex v = 0.0;
        for (int b = 0; b < bath_dim; ++b)
            for (int i = 0; i < dc; ++i)
                for (int j = 0; j < dc; ++j) v += std::conj(q0(i)) * rho(i * bath_dim + b, j * bath_dim + b) * q1(j);
        out.push_back(v);
    }
    const Complex norm = out[0];
    for (auto& v : out) v /= norm;
    return out;
}

} // namespace

TEST_SUITE("cce-engine") {

TEST_CASE("pulse timings") {
    const auto hahn = pulse_timings(PulseSequence::hahn(), 2.0);
    REQUIRE(hahn.size() == 3);
    CHECK(hahn[0] == SequenceStep{false, 1.0});
    CHECK(hahn[1].is_pulse);
    CHECK(hahn[2] == SequenceStep{false, 1.0});
    CHECK(pulse_timings(PulseSequence::cpmg(1), 2.0) == hahn);
    const auto c4 = pulse_timings(PulseSequence::cpmg(4), 8.0);
    REQUIRE(c4.size() == 12);
    int free = 0, pulses = 0;
    for (const auto& s : c4) {
        if (s.is_pulse) {
            ++pulses;
        } else {
            ++free;
            CHECK(s.duration == 1.0);
        }
    }
    CHECK(free == 8);
    CHECK(pulses == 4);
    const auto fid = pulse_timings(PulseSequence::fid(), 3.0);
    REQUIRE(fid.size() == 1);
    CHECK(fid[0].duration == 3.0);
    CHECK_THROWS_AS(pulse_timings(PulseSequence::hahn(), -1.0), ConfigError);
}

TEST_CASE("empty cluster FID is a pure phase") {
    const CentralSystem cs = testing::free_electron();
    const ClusterEvaluator ev(cs, {}, PulseSequence::fid(), uniform_grid(1e-3, 11));
    const auto c = ev.evaluate({});
    for (const auto& v : c) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("decoupled bath spin leaves the coherence untouched") {
    const CentralSystem cs = testing::free_electron();
    CouplingOptions opts;
    opts.central = CentralCoupling::None;
    const std::vector<BathSpin> bath = {testing::spin_at(Vec3(2, 1, 0))};
    const int members[] = {0};
    for (const auto& seq : {PulseSequence::fid(), PulseSequence::hahn(), PulseSequence::cpmg(3)}) {
        const ClusterEvaluator ev(cs, bath, seq, uniform_grid(0.05, 21), opts);
        // Only the bare Larmor phase remains.
        CHECK(max_dev(ev.evaluate(members), ev.evaluate({})) < 1e-9);
    }
}

TEST_CASE("ising pair FID follows |cos(a t / 2)|") {
    const CentralSystem cs = testing::free_electron();
    CouplingOptions opts;
    opts.central = CentralCoupling::Ising;
    const std::vector<BathSpin> bath = {testing::spin_at(Vec3(1.5, 0.4, 2.0))};
    const double a = dipole_tensor(Vec3::Zero(), bath[0].position, cs.dipolar_gamma(), 26.7522).value(2, 2);
    const auto times = uniform_grid(4.0 * std::numbers::pi / std::abs(a), 41);
    const ClusterEvaluator ev(cs, bath, PulseSequence::fid(), times, opts);
    const int members[] = {0};
    const auto c = ev.evaluate(members);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(c[i]) == doctest::Approx(std::abs(std::cos(a * times[i] / 2))).epsilon(1e-9));
}

TEST_CASE("cluster evaluation matches density-matrix propagation") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(3, 6.0, 5);
    const auto times = uniform_grid(0.02, 9);
    const int members[] = {0, 1, 2};
    const HermitianMatrix h = build_cluster_hamiltonian(cs, bath, {});
    for (const auto& seq : {PulseSequence::fid(), PulseSequence::hahn(), PulseSequence::cpmg(2)}) {
        const ClusterEvaluator ev(cs, bath, seq, times);
        CHECK(max_dev(ev.evaluate(members), density_matrix_oracle(h, cs, 8, seq, times)) < 1e-9);
    }
}

TEST_CASE("mean-field fields are explicit sums over the frozen spins") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(4, 8.0, 9);
    const MeanFieldSample sample{{0.5, -0.5, -0.5, 0.5}, 0};
    const MeanFieldFields f = mean_field_fields(cs, bath, sample);
    Vec3 central = Vec3::Zero();
    for (std::size_t a = 0; a < 4; ++a)
        central += dipole_tensor(cs.position, bath[a].position, cs.dipolar_gamma(), 26.7522).value * Vec3(0, 0, sample.iz[a]);
    CHECK((f.central - central).norm() < 1e-9 * central.norm());
    Vec3 on1 = Vec3::Zero();
    for (std::size_t a : {0u, 2u, 3u})
        on1 += dipole_tensor(bath[1].position, bath[a].position, 26.7522, 26.7522).value * Vec3(0, 0, sample.iz[a]);
    CHECK((f.per_spin[1] - on1).norm() < 1e-9 * on1.norm());
}

TEST_CASE("cluster evaluation with mean field matches the frozen-spin Hamiltonian") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(4, 7.0, 12);
    const MeanFieldSample sample{{-0.5, 0.5, 0.5, -0.5}, 0};
    const MeanFieldFields f = mean_field_fields(cs, bath, sample);
    const auto times = uniform_grid(0.03, 7);
    const int members[] = {1, 3};
    const std::vector<BathSpin> cluster = {bath[1], bath[3]};
    const std::vector<MeanFieldSpin> frozen = {{bath[0], -0.5}, {bath[2], 0.5}};
    const HermitianMatrix h = build_cluster_hamiltonian(cs, cluster, frozen);
    const ClusterEvaluator ev(cs, bath, PulseSequence::hahn(), times);
    CHECK(max_dev(ev.evaluate(members, &f), density_matrix_oracle(h, cs, 4, PulseSequence::hahn(), times)) < 1e-9);
}

TEST_CASE("mixed member state is the average over sampled member states") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(4, 7.0, 21);
    const auto times = uniform_grid(0.04, 9);
    const ClusterEvaluator ev(cs, bath, PulseSequence::hahn(), times);
    const int members[] = {0, 2};
    const MeanFieldFields mixed = mean_field_fields(cs, bath, MeanFieldSample{{0.5, 0.5, -0.5, 0.5}, 0});
    const auto reference = ev.evaluate(members, &mixed);
    ComplexCurve avg(times.size(), 0.0);
    for (double m0 : {0.5, -0.5})
        for (double m2 : {0.5, -0.5}) {
            MeanFieldFields f = mean_field_fields(cs, bath, MeanFieldSample{{m0, 0.5, m2, 0.5}, 0});
            f.sampled_members = true;
            const auto c = ev.evaluate(members, &f);
            for (std::size_t i = 0; i < c.size(); ++i) avg[i] += c[i] / 4.0;
        }
    CHECK(max_dev(avg, reference) < 1e-9);
}

TEST_CASE("uncoupled pair has unit irreducible contribution") {
    // Low field keeps the Larmor phase, and its rounding, small.
    const CentralSystem cs = testing::free_electron(30.0);
    CouplingOptions opts;
    opts.central = CentralCoupling::Ising;
    opts.bath_bath = false;
    const std::vector<BathSpin> bath = {testing::spin_at(Vec3(2, 0, 1)), testing::spin_at(Vec3(0, 3, 1))};
    const auto times = uniform_grid(0.05, 21);
    const ClusterEvaluator ev(cs, bath, PulseSequence::fid(), times, opts);
    const ClusterSet set = enumerate_clusters(build_connectivity(bath, 10.0), 2);
    std::vector<ComplexCurve> raw;
    for (const auto& c : set.clusters()) raw.push_back(ev.evaluate(c.members));
    const ComplexCurve empty = ev.evaluate({});
    const auto irr = irreducible_coherence(set, raw, nullptr, &empty);
    CHECK(max_dev(irr[2], ComplexCurve(times.size(), 1.0)) < 1e-9);
    CHECK(irreducible_coherence(set, raw)[0] == raw[0]);
    const auto total = total_coherence(set, irr, times, &empty);
    CHECK(total.values[0] == Complex(1.0, 0.0));
    CHECK(max_dev(total.values, ev.evaluate(std::vector<int>{0, 1})) < 1e-9);
}

TEST_CASE("division guard replaces tiny denominators") {
    const std::vector<Vec3> p = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    const ClusterSet set = enumerate_clusters(build_connectivity(std::span<const Vec3>(p), 2.0), 2);
    std::vector<ComplexCurve> raw = {{1.0, 0.0, 0.5}, {1.0, 0.5, 0.5}, {1.0, 0.3, 0.2}};
    GuardCounter counter;
    const auto irr = irreducible_coherence(set, raw, &counter);
    CHECK(counter.guarded == 1);
    CHECK(counter.total == 3);
    CHECK(irr[2][1] == Complex(1.0, 0.0));
    CHECK(std::abs(irr[2][2] - Complex(0.8, 0.0)) < 1e-15);
}

TEST_CASE("full-order expansion reproduces the exact result, with or without mean field") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(4, 6.0, 33);
    EngineSettings s;
    s.order = 4;
    s.r_dipole = 1e9;
    s.times = uniform_grid(0.05, 11);
    s.sequence = PulseSequence::hahn();
    const auto exact = exact_coherence(cs, bath, s.sequence, s.times);
    CHECK(max_dev(gcce_coherence(cs, bath, s).values, exact.values) < 1e-8);
    // With every spin inside the top cluster the frozen fields telescope away.
    const MeanFieldSample sample = MeanFieldSample::draw(bath, 4);
    CHECK(max_dev(gcce_coherence(cs, bath, s, &sample).values, exact.values) < 1e-8);
}

TEST_CASE("CPMG-1 equals Hahn echo exactly") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(6, 10.0, 2);
    EngineSettings s;
    s.order = 2;
    s.r_dipole = 6.0;
    s.times = uniform_grid(0.05, 21);
    s.sequence = PulseSequence::hahn();
    const auto hahn = gcce_coherence(cs, bath, s);
    s.sequence = PulseSequence::cpmg(1);
    const auto cpmg = gcce_coherence(cs, bath, s);
    CHECK(hahn.values == cpmg.values);
}

TEST_CASE("hahn echo refocuses static secular couplings") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(6, 10.0, 8);
    EngineSettings s;
    s.order = 2;
    s.r_dipole = 8.0;
    s.coupling.central = CentralCoupling::Ising;
    s.coupling.bath_bath = false;
    s.times = uniform_grid(0.5, 51);
    s.sequence = PulseSequence::hahn();
    for (const auto& v : gcce_coherence(cs, bath, s).values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-8);
    s.sequence = PulseSequence::fid();
    const auto fid = gcce_coherence(cs, bath, s).magnitude();
    CHECK(*std::min_element(fid.begin(), fid.end()) < 0.5);
}

TEST_CASE("results do not depend on the worker count") {
    const CentralSystem cs = testing::free_electron();
    const auto bath = proton_cloud(14, 14.0, 77);
    EngineSettings s;
    s.order = 3;
    s.r_dipole = 6.0;
    s.times = uniform_grid(0.05, 11);
    const MeanFieldSample sample = MeanFieldSample::draw(bath, 5);
    const auto one = gcce_coherence(cs, bath, s, &sample);
    s.workers = 3;
    const auto three = gcce_coherence(cs, bath, s, &sample);
    CHECK(one.values == three.values);
    CHECK(one.meta.n_clusters == three.meta.n_clusters);
}

TEST_CASE("mean-field samples are uniform over m") {
    std::vector<BathSpin> bath(3000, testing::spin_at(Vec3(1, 0, 0), SpinSpecies{"D", 1.0, 4.1065, 0.0, 1.0}));
    const auto s = MeanFieldSample::draw(bath, 99);
    int counts[3] = {0, 0, 0};
    for (double m : s.iz) ++counts[static_cast<int>(m + 1.0)];
    for (int c : counts) CHECK(std::abs(c - 1000) < 5 * std::sqrt(3000 * (1.0 / 3) * (2.0 / 3)));
    CHECK(MeanFieldSample::draw(bath, 99).iz == s.iz);
}

TEST_CASE("ensemble averages realizations and samples with derived seeds") {
    const CentralSystem cs = testing::free_electron();
    EnsembleProblem p;
    p.central = cs;
    p.n_realizations = 2;
    p.n_meanfield_samples = 2;
    p.seed = 17;
    p.settings.order = 2;
    p.settings.r_dipole = 6.0;
    p.settings.times = uniform_grid(0.03, 7);
    p.realization = [](std::size_t, std::uint64_t seed) {
        BathRealization r;
        r.spins = proton_cloud(5, 9.0, seed);
        r.seed = seed;
        return r;
    };
    const auto avg = ensemble_coherence(p);
    ComplexCurve manual(7, 0.0);
    for (std::size_t r = 0; r < 2; ++r) {
        const auto bath = p.realization(r, realization_seed(17, r)).spins;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto sample = MeanFieldSample::draw(bath, meanfield_seed(17, r, k));
            const auto c = gcce_coherence(cs, bath, p.settings, &sample);
            for (std::size_t i = 0; i < 7; ++i) manual[i] += c.values[i] / 4.0;
        }
    }
    CHECK(max_dev(avg.values, manual) < 1e-14);
    CHECK(avg.meta.seeds.size() >= 2);
    CHECK(avg.values[0] == Complex(1.0, 0.0));
}

TEST_CASE("ensemble reports failures and rethrows when every realization fails") {
    EnsembleProblem p;
    p.central = testing::free_electron();
    p.n_realizations = 2;
    p.settings.times = uniform_grid(0.01, 5);
    p.realization = [](std::size_t r, std::uint64_t) -> BathRealization {
        if (r == 1) throw ConfigError("broken realization");
        BathRealization b;
        b.spins = proton_cloud(3, 8.0, 1);
        return b;
    };
    const auto c = ensemble_coherence(p);
    CHECK(c.meta.failures.size() == 1);
    p.realization = [](std::size_t, std::uint64_t) -> BathRealization { throw ConfigError("broken"); };
    CHECK_THROWS_AS(ensemble_coherence(p), ConfigError);
}

}
