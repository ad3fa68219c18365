#include "gcce/cce.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>

#include "gcce/error.hpp"
#include "gcce/parallel.hpp"
#include "gcce/rng.hpp"

namespace gcce {

namespace {

// r - I for the ideal pi rotation on the qubit pair.
Eigen::Matrix2cd pulse_minus_identity(PulseAxis axis) {
    Eigen::Matrix2cd r;
    if (axis == PulseAxis::Y)
        r << 0.0, -1.0, 1.0, 0.0;
    else
        r << 0.0, Complex(0.0, -1.0), Complex(0.0, -1.0), 0.0;
    return r - Eigen::Matrix2cd::Identity();
}

// Adjacent free segments merged.
std::vector<SequenceStep> merged_steps(const PulseSequence& seq, double t) {
    std::vector<SequenceStep> out;
    for (const auto& step : pulse_timings(seq, t)) {
        if (!step.is_pulse && !out.empty() && !out.back().is_pulse)
            out.back().duration += step.duration;
        else
            out.push_back(step);
    }
    return out;
}

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw ConfigError("time grid is empty");
    for (double t : times)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("time grid must contain finite non-negative values");
}

} // namespace

std::vector<double> CoherenceCurve::magnitude() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
    return out;
}

MeanFieldSample MeanFieldSample::draw(std::span<const BathSpin> bath, std::uint64_t seed) {
    MeanFieldSample sample;
    sample.seed = seed;
    sample.iz.reserve(bath.size());
    Rng rng(seed);
    for (const auto& spin : bath) {
        const int d = spin_dimension(spin.species.s);
        const auto k = rng.below(static_cast<std::uint64_t>(d));
        sample.iz.push_back(spin.species.s - static_cast<double>(k));
    }
    return sample;
}

MeanFieldFields mean_field_fields(const CentralSystem& cs, std::span<const BathSpin> bath, const MeanFieldSample& sample,
                                  const CouplingOptions& options) {
    if (sample.iz.size() != bath.size()) throw ShapeError("mean-field sample does not match bath size");
    MeanFieldFields f;
    f.iz = sample.iz;
    f.per_spin.assign(bath.size(), Vec3::Zero());
    const double gamma_c = cs.dipolar_gamma();
    for (std::size_t a = 0; a < bath.size(); ++a) {
        if (sample.iz[a] == 0.0) continue;
        const Vec3 m(0.0, 0.0, sample.iz[a]);
        f.central += project_central_coupling(dipole_tensor(cs.position, bath[a].position, gamma_c, bath[a].species.gamma).value,
                                              options.central) *
                     m;
        if (!options.bath_bath) continue;
        for (std::size_t i = 0; i < bath.size(); ++i) {
            if (i == a) continue;
            f.per_spin[i] += dipole_tensor(bath[i].position, bath[a].position, bath[i].species.gamma, bath[a].species.gamma).value * m;
        }
    }
    return f;
}

std::vector<double> uniform_grid(double t_max, std::size_t n_points) {
    if (n_points < 2) throw ConfigError("time grid needs at least 2 points");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    std::vector<double> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i) out[i] = t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    return out;
}

ClusterEvaluator::ClusterEvaluator(const CentralSystem& cs, std::vector<BathSpin> bath, PulseSequence seq,
                                   std::vector<double> times, CouplingOptions options)
    : cs_(cs), basis_(central_basis(cs)), bath_(std::move(bath)), seq_(seq), times_(std::move(times)), options_(options) {
    check_times(times_);
    seq_.refocusing_pulses();
}

ComplexCurve ClusterEvaluator::evaluate(std::span<const int> members, const MeanFieldFields* fields) const {
    std::vector<BathSpin> spins;
    spins.reserve(members.size());
    for (int m : members) spins.push_back(bath_.at(static_cast<std::size_t>(m)));

    Vec3 central_mf = Vec3::Zero();
    std::vector<Vec3> member_mf(spins.size(), Vec3::Zero());
    if (fields) {
        central_mf = fields->central;
        for (std::size_t i = 0; i < spins.size(); ++i) {
            const auto idx = static_cast<std::size_t>(members[i]);
            const double mi = fields->iz[idx];
            if (mi != 0.0)
                central_mf -= project_central_coupling(
                                  dipole_tensor(basis_.position, spins[i].position, basis_.dipolar_gamma, spins[i].species.gamma).value,
                                  options_.central) *
                              Vec3(0.0, 0.0, mi);
            if (!options_.bath_bath) continue;
            member_mf[i] = fields->per_spin[idx];
            for (std::size_t j = 0; j < spins.size(); ++j) {
                const double mj = fields->iz[static_cast<std::size_t>(members[j])];
                if (j == i || mj == 0.0) continue;
                member_mf[i] -= dipole_tensor(spins[i].position, spins[j].position, spins[i].species.gamma, spins[j].species.gamma).value *
                                Vec3(0.0, 0.0, mj);
            }
        }
    }

    const CMatrix h = assemble_cluster_hamiltonian(basis_.rotated, basis_.position, basis_.dipolar_gamma, basis_.field, spins,
                                                   central_mf, member_mf, options_);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("cluster diagonalization failed");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const CMatrix& v = solver.eigenvectors();

    const Eigen::Index dim = h.rows();
    const Eigen::Index db = dim / basis_.rotated.h.rows();
    const CMatrix r0 = v.middleRows(static_cast<Eigen::Index>(basis_.level0) * db, db);
    const CMatrix r1 = v.middleRows(static_cast<Eigen::Index>(basis_.level1) * db, db);
    CMatrix z0 = (r0.adjoint() + r1.adjoint()) * std::sqrt(0.5);
    if (fields && fields->sampled_members) {
        Eigen::Index col = 0;
        for (std::size_t i = 0; i < spins.size(); ++i) {
            const double s = spins[i].species.s;
            const auto k = static_cast<Eigen::Index>(std::lround(s - fields->iz[static_cast<std::size_t>(members[i])]));
            col = col * static_cast<Eigen::Index>(std::lround(2.0 * s + 1.0)) + k;
        }
        z0 = CMatrix(z0.col(col));
    }

    CMatrix g, k;
    if (seq_.refocusing_pulses() > 0) {
        const Eigen::Matrix2cd m = pulse_minus_identity(seq_.axis);
        g.resize(dim, 2 * db);
        g.leftCols(db) = r0.adjoint();
        g.rightCols(db) = r1.adjoint();
        k.resize(2 * db, dim);
        k.topRows(db) = m(0, 0) * r0 + m(0, 1) * r1;
        k.bottomRows(db) = m(1, 0) * r0 + m(1, 1) * r1;
    }

    auto raw_at = [&](double t) {
        CMatrix z = z0;
        for (const auto& step : merged_steps(seq_, t)) {
            if (step.is_pulse) {
                z.noalias() += g * (k * z);
            } else if (step.duration != 0.0) {
                const Eigen::VectorXcd phase = (lambda * Complex(0.0, -step.duration)).array().exp();
                z = phase.asDiagonal() * z;
            }
        }
        const CMatrix x = r0 * z;
        const CMatrix y = r1 * z;
        return x.cwiseProduct(y.conjugate()).sum() / static_cast<double>(z.cols());
    };

    const Complex norm = raw_at(0.0);
    if (std::abs(norm) < 1e-12) throw NumericalError("vanishing coherence at t = 0");
    ComplexCurve out(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) out[i] = times_[i] == 0.0 ? Complex(1.0, 0.0) : raw_at(times_[i]) / norm;
    return out;
}

ComplexCurve cluster_coherence(const CentralSystem& cs, const Cluster& cluster, std::span<const BathSpin> bath,
                               const MeanFieldSample* mean_field, const PulseSequence& seq, const std::vector<double>& times,
                               const CouplingOptions& options) {
    ClusterEvaluator eval(cs, std::vector<BathSpin>(bath.begin(), bath.end()), seq, times, options);
    if (!mean_field) return eval.evaluate(cluster.members);
    const MeanFieldFields fields = mean_field_fields(cs, bath, *mean_field, options);
    return eval.evaluate(cluster.members, &fields);
}

namespace {

// raw / prod(irreducible of proper subclusters), with the division guard.
ComplexCurve quotient(const ClusterSet& set, std::size_t index, const ComplexCurve& raw,
                      const std::vector<ComplexCurve>& irreducible, GuardCounter& counter, const ComplexCurve* empty) {
    const Cluster& c = set.clusters()[index];
    if (c.order() == 1 && !empty) return raw;
    ComplexCurve denom = empty ? *empty : ComplexCurve(raw.size(), Complex(1.0, 0.0));
    for (std::size_t sub : subcluster_indices(c, set)) {
        const ComplexCurve& s = irreducible.at(sub);
        for (std::size_t i = 0; i < raw.size(); ++i) denom[i] *= s[i];
    }
    ComplexCurve out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        ++counter.total;
        if (std::abs(denom[i]) < kDivisionGuard) {
            ++counter.guarded;
            out[i] = Complex(1.0, 0.0);
        } else {
            out[i] = raw[i] / denom[i];
        }
    }
    return out;
}

} // namespace

std::vector<ComplexCurve> irreducible_coherence(const ClusterSet& set, const std::vector<ComplexCurve>& raw, GuardCounter* counter,
                                                const ComplexCurve* empty) {
    if (raw.size() != set.size()) throw ShapeError("raw curves do not cover the cluster set");
    GuardCounter local;
    std::vector<ComplexCurve> out(set.size());
    // Clusters are sorted by order, so every subcluster precedes its parents.
    for (std::size_t i = 0; i < set.size(); ++i) out[i] = quotient(set, i, raw[i], out, local, empty);
    if (counter) {
        counter->guarded += local.guarded;
        counter->total += local.total;
    }
    return out;
}

CoherenceCurve total_coherence(const ClusterSet& set, const std::vector<ComplexCurve>& irreducible,
                               const std::vector<double>& times, const ComplexCurve* empty) {
    if (irreducible.size() != set.size()) throw ShapeError("irreducible curves do not cover the cluster set");
    CoherenceCurve curve;
    curve.times = times;
    curve.values = empty ? *empty : ComplexCurve(times.size(), Complex(1.0, 0.0));
    if (curve.values.size() != times.size()) throw ShapeError("curve length differs from the time grid");
    for (const auto& c : irreducible) {
        if (c.size() != times.size()) throw ShapeError("curve length differs from the time grid");
        for (std::size_t i = 0; i < times.size(); ++i) curve.values[i] *= c[i];
    }
    curve.meta.n_clusters = set.size();
    curve.meta.order = set.max_order();
    return curve;
}

CoherenceCurve gcce_coherence(const CentralSystem& cs, std::span<const BathSpin> bath, const EngineSettings& settings,
                              const MeanFieldSample* mean_field) {
    check_times(settings.times);
    const ClusterSet set = enumerate_clusters(build_connectivity(bath, settings.r_dipole), settings.order, settings.cluster_cap);
    const ClusterEvaluator eval(cs, std::vector<BathSpin>(bath.begin(), bath.end()), settings.sequence, settings.times,
                                settings.coupling);
    MeanFieldFields fields;
    if (mean_field) fields = mean_field_fields(cs, bath, *mean_field, settings.coupling);
    fields.sampled_members = settings.sampled_members;
    const MeanFieldFields* fp = mean_field ? &fields : nullptr;

    const std::size_t n_t = settings.times.size();
    const ComplexCurve empty = eval.evaluate({}, fp);
    CoherenceCurve curve;
    curve.times = settings.times;
    curve.values = empty;
    GuardCounter guard;

    const std::size_t top = set.max_order();
    std::vector<ComplexCurve> stored(top > 0 ? set.order_range(top).first : 0);
    auto multiply = [&](const ComplexCurve& c) {
        for (std::size_t i = 0; i < n_t; ++i) curve.values[i] *= c[i];
    };

    for (std::size_t order = 1; order <= top; ++order) {
        const auto [begin, end] = set.order_range(order);
        const std::size_t chunk = order < top ? end - begin : std::size_t{1024};
        for (std::size_t lo = begin; lo < end; lo += chunk) {
            const std::size_t hi = std::min(end, lo + chunk);
            std::vector<ComplexCurve> results(hi - lo);
            std::vector<GuardCounter> counters(hi - lo);
            parallel_for(hi - lo, settings.workers, [&](std::size_t j) {
                const std::size_t idx = lo + j;
                const ComplexCurve raw = eval.evaluate(set.clusters()[idx].members, fp);
                results[j] = quotient(set, idx, raw, stored, counters[j], &empty);
            });
            for (std::size_t j = 0; j < results.size(); ++j) {
                guard.guarded += counters[j].guarded;
                guard.total += counters[j].total;
                multiply(results[j]);
                if (order < top) stored[lo + j] = std::move(results[j]);
            }
        }
    }

    curve.meta.order = settings.order;
    curve.meta.r_dipole = settings.r_dipole;
    curve.meta.sequence = settings.sequence.label();
    curve.meta.field = cs.field;
    curve.meta.n_clusters = set.size();
    curve.meta.guarded_points = guard.guarded;
    curve.meta.total_points = guard.total;
    curve.meta.flagged = guard.total > 0 && 100 * guard.guarded > guard.total;
    if (mean_field) curve.meta.seeds.push_back(mean_field->seed);
    return curve;
}

std::uint64_t realization_seed(std::uint64_t master, std::size_t r) { return derive_seed(master, {0x5eedu, r}); }

std::uint64_t meanfield_seed(std::uint64_t master, std::size_t r, std::size_t k) {
    return derive_seed(master, {0x3fu, r, k});
}

CoherenceCurve ensemble_coherence(const EnsembleProblem& problem) {
    if (problem.n_realizations < 1) throw ConfigError("n_realizations must be at least 1");
    if (!problem.realization) throw ConfigError("no bath realization generator");
    const std::size_t samples = problem.mean_field ? std::max<std::size_t>(1, problem.n_meanfield_samples) : 1;

    CoherenceCurve out;
    out.times = problem.settings.times;
    out.values.assign(out.times.size(), Complex(0.0, 0.0));
    std::size_t count = 0;
    std::exception_ptr first_failure;

    for (std::size_t r = 0; r < problem.n_realizations; ++r) {
        const std::uint64_t seed = realization_seed(problem.seed, r);
        try {
            const BathRealization bath = problem.realization(r, seed);
            out.meta.seeds.push_back(seed);
            for (std::size_t k = 0; k < samples; ++k) {
                std::optional<MeanFieldSample> mf;
                if (problem.mean_field) {
                    mf = MeanFieldSample::draw(bath.spins, meanfield_seed(problem.seed, r, k));
                    out.meta.seeds.push_back(mf->seed);
                }
                const CoherenceCurve c = gcce_coherence(problem.central, bath.spins, problem.settings, mf ? &*mf : nullptr);
                for (std::size_t i = 0; i < c.values.size(); ++i) out.values[i] += c.values[i];
                out.meta.n_clusters += c.meta.n_clusters;
                out.meta.guarded_points += c.meta.guarded_points;
                out.meta.total_points += c.meta.total_points;
                ++count;
            }
        } catch (const Error& e) {
            if (!first_failure) first_failure = std::current_exception();
            std::ostringstream msg;
            msg << "realization " << r << " (seed " << seed << "): " << e.what();
            out.meta.failures.push_back(msg.str());
        }
    }
    if (count == 0) std::rethrow_exception(first_failure);
    for (auto& v : out.values) v /= static_cast<double>(count);
    out.meta.order = problem.settings.order;
    out.meta.r_bath = problem.r_bath;
    out.meta.r_dipole = problem.settings.r_dipole;
    out.meta.sequence = problem.settings.sequence.label();
    out.meta.field = problem.central.field;
    out.meta.flagged = out.meta.total_points > 0 && 100 * out.meta.guarded_points > out.meta.total_points;
    return out;
}

} // namespace gcce
