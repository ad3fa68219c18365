#include "gcce/pulse.hpp"

#include "gcce/error.hpp"

namespace gcce {

int PulseSequence::refocusing_pulses() const {
    switch (kind) {
    case SequenceKind::FID: return 0;
    case SequenceKind::HahnEcho: return 1;
    case SequenceKind::CPMG:
        if (n_pulses < 1) throw ConfigError("CPMG needs at least one pulse");
        return n_pulses;
    }
    return 0;
}

std::string PulseSequence::label() const {
    switch (kind) {
    case SequenceKind::FID: return "fid";
    case SequenceKind::HahnEcho: return "hahn";
    case SequenceKind::CPMG: return "cpmg-" + std::to_string(n_pulses);
    }
    return "?";
}

std::vector<SequenceStep> pulse_timings(const PulseSequence& seq, double t) {
    if (t < 0.0) throw ConfigError("evolution time must be non-negative");
    const int n = seq.refocusing_pulses();
    if (n == 0) return {SequenceStep{false, t}};
    const double tau = t / (2.0 * n);
    std::vector<SequenceStep> steps;
    steps.reserve(static_cast<std::size_t>(3 * n));
    for (int k = 0; k < n; ++k) {
        steps.push_back({false, tau});
        steps.push_back({true, 0.0});
        steps.push_back({false, tau});
    }
    return steps;
}

} // namespace gcce
