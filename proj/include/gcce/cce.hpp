#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcce/clusters.hpp"
#include "gcce/hamiltonian.hpp"
#include "gcce/pulse.hpp"
#include "gcce/structure.hpp"
#include "gcce/types.hpp"

namespace gcce {

struct CoherenceMeta {
    std::size_t order = 0;
    double r_bath = 0.0;
    double r_dipole = 0.0;
    std::vector<std::uint64_t> seeds;
    std::string sequence;
    Vec3 field = Vec3::Zero();
    std::size_t n_clusters = 0;
    std::size_t guarded_points = 0;
    std::size_t total_points = 0;
    bool flagged = false; // more than 1% of quotients guarded
    std::vector<std::string> failures;
};

struct CoherenceCurve {
    std::vector<double> times; // ms
    ComplexCurve values;
    CoherenceMeta meta;

    std::vector<double> magnitude() const;
};

// Frozen m_z value for every bath spin.
struct MeanFieldSample {
    std::vector<double> iz;
    std::uint64_t seed = 0;

    // Each m drawn uniformly from {-s, ..., s}.
    static MeanFieldSample draw(std::span<const BathSpin> bath, std::uint64_t seed);
};

// Static fields produced by a full mean-field sample, summed over all bath spins.
struct MeanFieldFields {
    std::vector<double> iz;
    Vec3 central = Vec3::Zero();         // field seen by S
    std::vector<Vec3> per_spin;          // field seen by I_i from every other spin
    bool sampled_members = false;        // cluster spins start in their sampled m instead of the mixed state
};

MeanFieldFields mean_field_fields(const CentralSystem& cs, std::span<const BathSpin> bath, const MeanFieldSample& sample,
                                  const CouplingOptions& options = {});

// Uniform grid of n points on [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t n_points);

// Evaluates normalized cluster coherence curves for one bath and one pulse sequence.
// Each cluster Hamiltonian is diagonalized once; the qubit is tracked in the
// eigenbasis of the central Hamiltonian and pulses act on the two qubit levels only.
class ClusterEvaluator {
public:
    ClusterEvaluator(const CentralSystem& cs, std::vector<BathSpin> bath, PulseSequence seq, std::vector<double> times,
                     CouplingOptions options = {});

    // Normalized coherence of the central spin coupled to the given bath spins.
    // Spins outside the cluster contribute through `fields` when provided.
    ComplexCurve evaluate(std::span<const int> members, const MeanFieldFields* fields = nullptr) const;

    const std::vector<BathSpin>& bath() const { return bath_; }
    const std::vector<double>& times() const { return times_; }
    const CentralBasis& basis() const { return basis_; }
    const CouplingOptions& options() const { return options_; }

private:
    CentralSystem cs_;
    CentralBasis basis_;
    std::vector<BathSpin> bath_;
    PulseSequence seq_;
    std::vector<double> times_;
    CouplingOptions options_;
};

ComplexCurve cluster_coherence(const CentralSystem& cs, const Cluster& cluster, std::span<const BathSpin> bath,
                               const MeanFieldSample* mean_field, const PulseSequence& seq, const std::vector<double>& times,
                               const CouplingOptions& options = {});

// Quotients below this magnitude in the denominator are replaced by 1.
inline constexpr double kDivisionGuard = 1e-10;

struct GuardCounter {
    std::size_t guarded = 0;
    std::size_t total = 0;
};

// L_C / prod of subcluster irreducible curves; raw and result indexed like set.clusters().
// `empty` is the coherence of the central spin with no cluster spins; when
// given, it is the order-zero factor and is divided out of every cluster.
std::vector<ComplexCurve> irreducible_coherence(const ClusterSet& set, const std::vector<ComplexCurve>& raw,
                                                GuardCounter* counter = nullptr, const ComplexCurve* empty = nullptr);

// Pointwise product in cluster order, times `empty` when given.
CoherenceCurve total_coherence(const ClusterSet& set, const std::vector<ComplexCurve>& irreducible,
                               const std::vector<double>& times, const ComplexCurve* empty = nullptr);

struct EngineSettings {
    std::size_t order = 2;
    double r_dipole = 8.0;
    CouplingOptions coupling;
    PulseSequence sequence = PulseSequence::hahn();
    std::vector<double> times;
    int workers = 1;
    std::size_t cluster_cap = 20'000'000;
    bool sampled_members = false;
};

// gCCE coherence of one bath for one mean-field sample (or none), including the
// order-zero factor of the bare central spin. Clusters of
// the highest order are evaluated in chunks and multiplied in cluster order
// without being stored.
CoherenceCurve gcce_coherence(const CentralSystem& cs, std::span<const BathSpin> bath, const EngineSettings& settings,
                              const MeanFieldSample* mean_field = nullptr);

struct EnsembleProblem {
    CentralSystem central;
    // Builds bath realization r from its derived seed.
    std::function<BathRealization(std::size_t r, std::uint64_t seed)> realization;
    std::size_t n_realizations = 1;
    std::size_t n_meanfield_samples = 1;
    bool mean_field = true;
    std::uint64_t seed = 1;
    double r_bath = 0.0;
    EngineSettings settings;
};

std::uint64_t realization_seed(std::uint64_t master, std::size_t r);
std::uint64_t meanfield_seed(std::uint64_t master, std::size_t r, std::size_t k);

// Mean of gcce_coherence over realizations and mean-field samples. Realizations
// that fail are recorded in meta.failures; throws if none succeed.
CoherenceCurve ensemble_coherence(const EnsembleProblem& problem);

} // namespace gcce
