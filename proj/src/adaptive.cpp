#include "ignn/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ignn {

double delta_z(const Matrix& previous, const Matrix& current) {
    return frobenius_distance(previous, current);
}

Decision ScheduleState::observe(const DriftSample& sample, bool accumulate) {
    drift_history.push_back(sample);
    if (observed_triggers >= budget)
        return {false, true};
    if (accumulate)
        accumulator += sample.drift;

    double effective;
    if (mode == ThresholdMode::Relative) {
        if (baseline_norm > 0.0)
            effective = accumulator / baseline_norm;
        else
            effective = accumulator > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        effective = accumulator;
    }

    if (effective >= theta) {
        ++observed_triggers;
        trigger_times.push_back(sample.event_index);
        accumulator = 0.0;
        return {true, false};
    }
    return {false, false};
}

PowerLawFit fit_power_law(std::span<const DriftSample> samples) {
    if (samples.size() < 3)
        throw std::invalid_argument("fit_power_law: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool distinct_times = false;
    for (const DriftSample& s : samples) {
        if (s.event_index < 1 || !(s.drift > 0.0))
            throw std::invalid_argument("fit_power_law: samples need positive time and drift");
        if (s.event_index != samples.front().event_index)
            distinct_times = true;
        double lx = std::log(static_cast<double>(s.event_index));
        double ly = std::log(s.drift);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    if (!distinct_times)
        throw std::invalid_argument("fit_power_law: times are all identical");
    double n = static_cast<double>(samples.size());
    double denom = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;

    PowerLawFit fit;
    fit.a = std::exp(intercept);
    fit.b = -slope;
    double ss = 0.0;
    for (const DriftSample& s : samples) {
        double lx = std::log(static_cast<double>(s.event_index));
        double r = std::log(s.drift) - (intercept + slope * lx);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

SchedulePrediction predict_schedule(const ScheduleState& state, std::size_t total_events,
                                    const PowerLawFit& fit) {
    if (state.mode != ThresholdMode::Absolute)
        throw std::invalid_argument(
            "predict_schedule: threshold must be absolute (pre-scale relative thresholds)");
    if (!(state.theta > 0.0))
        throw std::invalid_argument("predict_schedule: theta must be positive");

    SchedulePrediction out;
    if (state.observed_triggers >= state.budget)
        return out;
    std::size_t remaining = state.budget - state.observed_triggers;
    std::size_t t = state.trigger_times.empty() ? 0 : state.trigger_times.back();
    double acc = state.accumulator;

    // Event-by-event accumulation of the fitted rate, the same arithmetic a
    // live observe() replay over that drift curve would perform.
    while (out.indices.size() < remaining && t < total_events) {
        ++t;
        acc += fit.a * std::pow(static_cast<double>(t), -fit.b);
        if (acc >= state.theta) {
            out.indices.push_back(t);
            acc = 0.0;
        }
    }

    if (out.indices.size() < remaining) {
        // Fitted drift dies out before the budget is spent: spread what is
        // left evenly over the tail so the final retrain lands on the end.
        out.clamped = true;
        std::size_t prev =
            out.indices.empty()
                ? (state.trigger_times.empty() ? 0 : state.trigger_times.back())
                : out.indices.back();
        std::size_t missing = remaining - out.indices.size();
        std::size_t span = total_events > prev ? total_events - prev : 0;
        for (std::size_t j = 1; j <= missing; ++j) {
            std::size_t idx = prev + span * j / missing;
            if (!out.indices.empty())
                idx = std::max(idx, out.indices.back() + 1);
            out.indices.push_back(std::min(idx, total_events));
        }
    }
    return out;
}

double staleness(std::span<const std::size_t> retrain_times,
                 const std::vector<std::pair<std::size_t, Matrix>>& timeline) {
    if (timeline.empty())
        throw std::invalid_argument("staleness: empty timeline");
    for (std::size_t rt : retrain_times) {
        bool found = false;
        for (const auto& [idx, z] : timeline)
            if (idx == rt) {
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument("staleness: retrain time " + std::to_string(rt) +
                                        " missing from timeline");
    }

    const Matrix* reference = &timeline.front().second;
    double total = 0.0;
    for (const auto& [idx, z] : timeline) {
        if (std::find(retrain_times.begin(), retrain_times.end(), idx) != retrain_times.end())
            reference = &z;
        total += frobenius_distance(z, *reference);
    }
    return total;
}

}  // namespace ignn
