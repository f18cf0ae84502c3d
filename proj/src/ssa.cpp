#include "sirsim/ssa.hpp"

#include <cmath>
#include <stdexcept>

namespace sirsim {

const char* to_string(TerminalReason reason) {
    switch (reason) {
        case TerminalReason::stopped: return "stopped";
        case TerminalReason::absorbed: return "absorbed";
        case TerminalReason::capped: return "capped";
    }
    return "unknown";
}

StopCondition StopCondition::component_zero(int index) {
    StopCondition s;
    s.mode = Mode::component_zero;
    s.component = index;
    return s;
}

StopCondition StopCondition::time_horizon(double t_max) {
    if (!(t_max >= 0.0)) throw std::invalid_argument("StopCondition: t_max must be >= 0");
    StopCondition s;
    s.mode = Mode::time_horizon;
    s.t_max = t_max;
    return s;
}

StopCondition StopCondition::when(std::function<bool(double, StateView)> pred) {
    StopCondition s;
    s.mode = Mode::predicate;
    s.pred = std::move(pred);
    return s;
}

StopCondition StopCondition::with_horizon(double t) const {
    StopCondition s = *this;
    s.t_max = t;
    return s;
}

StopCondition StopCondition::with_event_cap(uint64_t cap) const {
    if (cap == 0) throw std::invalid_argument("StopCondition: event cap must be > 0");
    StopCondition s = *this;
    s.event_cap = cap;
    return s;
}

bool StopCondition::met(double t, StateView state) const {
    switch (mode) {
        case Mode::component_zero:
            if (state[static_cast<size_t>(component)] == 0) return true;
            break;
        case Mode::time_horizon:
            break;
        case Mode::predicate:
            if (pred(t, state)) return true;
            break;
    }
    return t >= t_max;
}

Recording Recording::grid(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Recording: grid dt must be > 0");
    return {Mode::grid, dt};
}

namespace {

struct NoRecorder {
    void initial(double, const State&) {}
    void before_jump(double, const State&) {}
    void after_jump(double, const State&) {}
    void terminal(double, const State&) {}
};

// Emits the initial state and every jump epoch, nothing else, so that
// consecutive records always differ by one stoichiometry vector.
struct EventRecorder {
    Trajectory* out;
    void initial(double t, const State& s) { push(t, s); }
    void before_jump(double, const State&) {}
    void after_jump(double t, const State& s) { push(t, s); }
    void terminal(double, const State&) {}
    void push(double t, const State& s) {
        out->times.push_back(t);
        out->flat.insert(out->flat.end(), s.begin(), s.end());
    }
};

// Emits the right-continuous state at multiples of dt, plus the initial and
// terminal states.
struct GridRecorder {
    Trajectory* out;
    double dt;
    double next_grid;

    void initial(double t, const State& s) {
        push(t, s);
        next_grid = dt;
    }
    void before_jump(double t_jump, const State& s) {
        while (next_grid < t_jump) {
            push(next_grid, s);
            next_grid += dt;
        }
    }
    void after_jump(double, const State&) {}
    void terminal(double t, const State& s) {
        while (next_grid < t) {
            push(next_grid, s);
            next_grid += dt;
        }
        if (out->times.empty() || t > out->times.back()) push(t, s);
    }
    void push(double t, const State& s) {
        out->times.push_back(t);
        out->flat.insert(out->flat.end(), s.begin(), s.end());
    }
};

template <typename Recorder>
SimResult run_direct(const ReactionSystem& system, State& state,
                     const StopCondition& stop, RngStream& rng,
                     EngineCounters* counters, Recorder&& rec) {
    const size_t n_reactions = system.reactions.size();
    std::vector<double> propensity(n_reactions);

    double t = 0.0;
    uint64_t events = 0;

    rec.initial(t, state);
    if (stop.met(t, state)) {
        rec.terminal(t, state);
        return {t, TerminalReason::stopped};
    }

    for (;;) {
        double total = 0.0;
        for (size_t j = 0; j < n_reactions; ++j) {
            propensity[j] = system.reactions[j].propensity(state);
            total += propensity[j];
        }

        if (total <= 0.0) {
            // Chain is stuck. A horizon stop still triggers, at t_max.
            if (std::isfinite(stop.t_max)) {
                t = stop.t_max;
                rec.terminal(t, state);
                return {t, TerminalReason::stopped};
            }
            rec.terminal(t, state);
            return {t, TerminalReason::absorbed};
        }

        const double sojourn = rng.exponential(total);
        if (t + sojourn >= stop.t_max) {
            t = stop.t_max;
            rec.terminal(t, state);
            return {t, TerminalReason::stopped};
        }
        t += sojourn;

        // Channel selection by cumulative scan in fixed reaction order.
        const double target = rng.uniform() * total;
        double acc = 0.0;
        size_t chosen = n_reactions - 1;
        for (size_t j = 0; j < n_reactions; ++j) {
            acc += propensity[j];
            if (target < acc) {
                chosen = j;
                break;
            }
        }

        rec.before_jump(t, state);
        const auto& delta = system.reactions[chosen].delta;
        for (int d = 0; d < system.dimension; ++d) state[static_cast<size_t>(d)] += delta[static_cast<size_t>(d)];
        rec.after_jump(t, state);

        ++events;
        if (counters) {
            counters->events = events;
            counters->steps = events;
        }

        if (stop.met(t, state)) {
            rec.terminal(t, state);
            return {t, TerminalReason::stopped};
        }
        if (events >= stop.event_cap) {
            rec.terminal(t, state);
            return {t, TerminalReason::capped};
        }
    }
}

}  // namespace

SimResult simulate_extinction(const ReactionSystem& system, State state,
                              const StopCondition& stop, RngStream& rng,
                              EngineCounters* counters) {
    if (!system.feasible(state))
        throw std::invalid_argument("simulate_extinction: initial state infeasible");
    return run_direct(system, state, stop, rng, counters, NoRecorder{});
}

Trajectory simulate_trajectory(const ReactionSystem& system, State state,
                               const StopCondition& stop, RngStream& rng,
                               const Recording& recording) {
    if (!system.feasible(state))
        throw std::invalid_argument("simulate_trajectory: initial state infeasible");

    Trajectory out;
    out.dimension = system.dimension;

    SimResult result;
    if (recording.mode == Recording::Mode::all_events) {
        result = run_direct(system, state, stop, rng, nullptr, EventRecorder{&out});
    } else {
        result = run_direct(system, state, stop, rng, nullptr,
                            GridRecorder{&out, recording.dt, recording.dt});
    }
    out.terminal_reason = result.reason;
    return out;
}

}  // namespace sirsim
