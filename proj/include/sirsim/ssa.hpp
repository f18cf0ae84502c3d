#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sirsim/process.hpp"
#include "sirsim/rng.hpp"

namespace sirsim {

enum class TerminalReason { stopped, absorbed, capped };

const char* to_string(TerminalReason reason);

// When and how a simulation ends. component_zero is the extinction stop
// (first time a state component hits 0); time_horizon stops at t_max;
// predicate is an arbitrary test of (t, state). A finite t_max may be
// combined with the other modes to censor long runs. event_cap bounds the
// number of reaction firings per replication; exhausting it reports
// TerminalReason::capped, never a silently truncated result.
struct StopCondition {
    enum class Mode { component_zero, time_horizon, predicate };

    Mode mode = Mode::component_zero;
    int component = 0;
    double t_max = std::numeric_limits<double>::infinity();
    std::function<bool(double, StateView)> pred;
    uint64_t event_cap = 1'000'000'000;

    static StopCondition component_zero(int index);
    static StopCondition time_horizon(double t_max);
    static StopCondition when(std::function<bool(double, StateView)> pred);

    StopCondition with_horizon(double t) const;
    StopCondition with_event_cap(uint64_t cap) const;

    bool met(double t, StateView state) const;
};

struct SimResult {
    double time = 0.0;
    TerminalReason reason = TerminalReason::stopped;
};

// Work counters, mainly for engine benchmarking: `events` counts reaction
// firings, `steps` counts algorithm iterations (for the exact engine the two
// coincide).
struct EngineCounters {
    uint64_t events = 0;
    uint64_t steps = 0;
};

// Recorded sample path. `times` starts at 0 with the initial state and is
// strictly increasing. With all-events recording, consecutive states differ
// by exactly one stoichiometry vector of the system.
struct Trajectory {
    int dimension = 0;
    std::vector<double> times;
    std::vector<int64_t> flat;  // times.size() * dimension entries
    TerminalReason terminal_reason = TerminalReason::stopped;

    size_t size() const { return times.size(); }
    StateView state(size_t k) const {
        return StateView(flat.data() + k * static_cast<size_t>(dimension),
                         static_cast<size_t>(dimension));
    }
};

struct Recording {
    enum class Mode { all_events, grid };
    Mode mode = Mode::all_events;
    double dt = 0.0;

    static Recording all_events() { return {Mode::all_events, 0.0}; }
    static Recording grid(double dt);
};

// Gillespie direct method: exponential sojourn at the total propensity, then
// channel choice by cumulative scan in fixed reaction order. Exact in
// distribution; bit-reproducible for a fixed (system, state, stop, seed).
// Promises distributional correctness only: for pathwise ordering between
// two chains use the coupling module, not shared streams.
SimResult simulate_extinction(const ReactionSystem& system, State state,
                              const StopCondition& stop, RngStream& rng,
                              EngineCounters* counters = nullptr);

Trajectory simulate_trajectory(const ReactionSystem& system, State state,
                               const StopCondition& stop, RngStream& rng,
                               const Recording& recording = Recording::all_events());

}  // namespace sirsim
