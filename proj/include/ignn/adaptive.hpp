#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ignn/matrix.hpp"

namespace ignn {

// Frobenius distance between consecutive embedding snapshots.
double delta_z(const Matrix& previous, const Matrix& current);

enum class ThresholdMode { Absolute, Relative };

struct DriftSample {
    std::size_t event_index = 0;
    double drift = 0.0; // Frobenius distance to the previous snapshot
};

struct Decision {
    bool retrain = false;
    bool exhausted = false; // budget already spent; observation recorded only
};

// Drift-driven retrain trigger with a fixed retrain budget. Accumulates
// drift since the last trigger and fires once the accumulation crosses
// theta (absolute), or theta times baseline_norm (relative).
struct ScheduleState {
    ThresholdMode mode = ThresholdMode::Absolute;
    double theta = 0.0;
    std::size_t budget = 0;
    double baseline_norm = 0.0; // reference distance for relative mode, caller-maintained

    double accumulator = 0.0;
    std::size_t observed_triggers = 0;
    std::vector<std::size_t> trigger_times;
    std::vector<DriftSample> drift_history;

    Decision observe(const DriftSample& sample, bool accumulate = true);
};

struct PowerLawFit {
    double a = 0.0;   // rate at t=1
    double b = 0.0;   // decay exponent; drift(t) = a * t^-b
    double rms = 0.0; // log-space residual of the fit
};

// Least squares of log(drift) against log(t). Needs >=3 samples with
// positive times and drifts.
PowerLawFit fit_power_law(std::span<const DriftSample> samples);

struct SchedulePrediction {
    std::vector<std::size_t> indices;
    bool clamped = false; // fitted drift could not fill the budget before the end
};

// Extends the observed triggers to the full budget by accumulating the
// fitted drift rate event by event, mirroring how observe() would replay
// it. State must carry an absolute-mode threshold. If the fitted drift
// cannot reach theta again before total_events, the remaining retrains are
// spread evenly up to total_events and the result is flagged.
SchedulePrediction predict_schedule(const ScheduleState& state, std::size_t total_events,
                                    const PowerLawFit& fit);

// Sum over checkpoints of the distance between the current embedding and
// the embedding at the most recent retrain. Timeline entries are
// (event_index, embedding); the first entry is the initial training point,
// and every retrain time must appear among the checkpoints.
double staleness(std::span<const std::size_t> retrain_times,
                 const std::vector<std::pair<std::size_t, Matrix>>& timeline);

}  // namespace ignn
