#pragma once

#include <string>
#include <vector>

namespace gcce {

enum class SequenceKind { FID, HahnEcho, CPMG };
enum class PulseAxis { X, Y };

struct PulseSequence {
    SequenceKind kind = SequenceKind::HahnEcho;
    int n_pulses = 1;
    PulseAxis axis = PulseAxis::Y;

    static PulseSequence fid() { return {SequenceKind::FID, 0, PulseAxis::Y}; }
    static PulseSequence hahn() { return {SequenceKind::HahnEcho, 1, PulseAxis::Y}; }
    static PulseSequence cpmg(int n) { return {SequenceKind::CPMG, n, PulseAxis::Y}; }

    // Number of refocusing pulses actually applied (0 for FID).
    int refocusing_pulses() const;
    std::string label() const;
    bool operator==(const PulseSequence&) const = default;
};

// One step of a sequence: free evolution for `duration` ms, or an ideal pi pulse.
struct SequenceStep {
    bool is_pulse = false;
    double duration = 0.0;
    bool operator==(const SequenceStep&) const = default;
};

// Steps in chronological order for total evolution time t (ms).
// CPMG-n: n x (tau, pi, tau) with tau = t/(2n); Hahn echo is CPMG-1; FID is a single segment.
std::vector<SequenceStep> pulse_timings(const PulseSequence& seq, double t);

} // namespace gcce
