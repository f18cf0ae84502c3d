#include "sirsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sirsim {

namespace {

void record(Trajectory& out, double t, std::initializer_list<int64_t> values) {
    out.times.push_back(t);
    out.flat.insert(out.flat.end(), values.begin(), values.end());
}

[[noreturn]] void dominance_error(const char* which, int64_t z, double dominant, double dominated) {
    std::ostringstream os;
    os << "coupled pair: dominance violated at state z = " << z << ": " << which
       << " (upper " << dominant << ", lower " << dominated << ")";
    throw std::invalid_argument(os.str());
}

}  // namespace

StopCondition all_components_zero(std::vector<int> components) {
    return StopCondition::when(
        [components = std::move(components)](double, StateView s) {
            for (int c : components)
                if (s[static_cast<size_t>(c)] != 0) return false;
            return true;
        });
}

CoupledPaths simulate_coupled_pair(const CoupledPair& pair, const StopCondition& stop,
                                   RngStream& rng) {
    if (pair.upper_start < pair.lower_start)
        throw std::invalid_argument("coupled pair: needs upper_start >= lower_start");

    int64_t z1 = pair.upper_start;
    int64_t z2 = pair.lower_start;

    CoupledPaths out;
    out.upper.dimension = 1;
    out.lower.dimension = 1;

    const auto note_extinctions = [&](double t) {
        if (!out.upper_extinction && z1 == 0) out.upper_extinction = t;
        if (!out.lower_extinction && z2 == 0) out.lower_extinction = t;
    };

    double t = 0.0;
    uint64_t events = 0;
    record(out.upper, t, {z1});
    record(out.lower, t, {z2});
    note_extinctions(t);

    State joint = {z1, z2};
    const auto finish = [&](TerminalReason reason) {
        out.upper.terminal_reason = reason;
        out.lower.terminal_reason = reason;
        return std::move(out);
    };

    if (stop.met(t, joint)) return finish(TerminalReason::stopped);

    // Joint channels: stoichiometry on (z1, z2) plus rate, rebuilt per state.
    struct Channel {
        int64_t d1, d2;
        double rate;
    };
    Channel channels[4];

    for (;;) {
        const double b1 = pair.upper_birth(z1);
        const double d1 = pair.upper_death(z1);
        const double b2 = pair.lower_birth(z2);
        const double d2 = pair.lower_death(z2);

        // Lazy dominance check at the visited states.
        if (pair.upper_birth(z2) < b2) dominance_error("birth rates cross", z2, pair.upper_birth(z2), b2);
        if (pair.upper_death(z2) > d2) dominance_error("death rates cross", z2, pair.upper_death(z2), d2);
        if (b1 < pair.lower_birth(z1)) dominance_error("birth rates cross", z1, b1, pair.lower_birth(z1));
        if (d1 > pair.lower_death(z1)) dominance_error("death rates cross", z1, d1, pair.lower_death(z1));

        size_t n_channels;
        if (z1 == z2) {
            channels[0] = {+1, 0, b1 - b2};
            channels[1] = {+1, +1, b2};
            channels[2] = {-1, -1, d1};
            channels[3] = {0, -1, d2 - d1};
            n_channels = 4;
        } else {
            channels[0] = {+1, 0, b1};
            channels[1] = {-1, 0, d1};
            channels[2] = {0, +1, b2};
            channels[3] = {0, -1, d2};
            n_channels = 4;
        }

        double total = 0.0;
        for (size_t c = 0; c < n_channels; ++c) total += channels[c].rate;

        if (total <= 0.0) {
            if (std::isfinite(stop.t_max)) return finish(TerminalReason::stopped);
            return finish(TerminalReason::absorbed);
        }

        const double sojourn = rng.exponential(total);
        if (t + sojourn >= stop.t_max) return finish(TerminalReason::stopped);
        t += sojourn;

        const double target = rng.uniform() * total;
        double acc = 0.0;
        size_t chosen = n_channels - 1;
        for (size_t c = 0; c < n_channels; ++c) {
            acc += channels[c].rate;
            if (target < acc) {
                chosen = c;
                break;
            }
        }

        z1 += channels[chosen].d1;
        z2 += channels[chosen].d2;
        record(out.upper, t, {z1});
        record(out.lower, t, {z2});
        note_extinctions(t);
        ++events;

        joint[0] = z1;
        joint[1] = z2;
        if (stop.met(t, joint)) return finish(TerminalReason::stopped);
        if (events >= stop.event_cap) return finish(TerminalReason::capped);
    }
}

SandwichResult simulate_sirs_sandwich(const SirsParams& params, SirsState state0,
                                      double upper_beta, double lower_beta,
                                      const StopCondition& stop, RngStream& rng) {
    if (state0.i < 0 || state0.r < 0 || state0.i + state0.r > params.n_pop)
        throw std::invalid_argument("sirs sandwich: initial state infeasible");
    if (!(lower_beta >= 0.0 && upper_beta >= lower_beta))
        throw std::invalid_argument("sirs sandwich: needs 0 <= lower_beta <= upper_beta");

    const double n = static_cast<double>(params.n_pop);
    const double lambda = params.lambda;
    const double gamma = params.gamma;

    int64_t i = state0.i;
    int64_t r = state0.r;
    int64_t upper = state0.i;
    int64_t lower = state0.i;

    SandwichResult out;
    out.lower.dimension = 1;
    out.mid.dimension = 1;
    out.upper.dimension = 1;

    double t = 0.0;
    uint64_t events = 0;

    const auto note = [&] {
        if (!out.lower_extinction && lower == 0) out.lower_extinction = t;
        if (!out.mid_extinction && i == 0) out.mid_extinction = t;
        if (!out.upper_extinction && upper == 0) out.upper_extinction = t;
        record(out.lower, t, {lower});
        record(out.mid, t, {i});
        record(out.upper, t, {upper});
    };
    note();

    State joint = {lower, i, upper, r};
    const auto finish = [&](TerminalReason reason) {
        out.terminal_reason = reason;
        out.lower.terminal_reason = reason;
        out.mid.terminal_reason = reason;
        out.upper.terminal_reason = reason;
        return std::move(out);
    };
    if (stop.met(t, joint)) return finish(TerminalReason::stopped);

    // Joint channels on (lower, i, upper, r).
    struct Channel {
        int64_t dl, di, du, dr;
        double rate;
    };
    Channel channels[8];

    for (;;) {
        // Per-head infection pressure of the SIRS chain at the current state.
        const double pressure = lambda * (1.0 - static_cast<double>(i + r) / n);
        const bool coupled = !out.domination_failed_at.has_value();
        if (coupled && i > 0 && (pressure < lower_beta || pressure > upper_beta))
            out.domination_failed_at = t;
        const bool couple_now = !out.domination_failed_at.has_value();

        const double b_mid = pressure * static_cast<double>(i);
        const double d_mid = static_cast<double>(i);
        const double b_up = upper_beta * static_cast<double>(upper);
        const double d_up = static_cast<double>(upper);
        const double b_lo = lower_beta * static_cast<double>(lower);
        const double d_lo = static_cast<double>(lower);
        const double loss = gamma * static_cast<double>(r);

        size_t n_channels = 0;
        const auto add = [&](int64_t dl, int64_t di, int64_t du, int64_t dr, double rate) {
            if (rate > 0.0) channels[n_channels++] = {dl, di, du, dr, rate};
        };

        add(0, 0, 0, -1, loss);  // immunity loss, SIRS only

        if (couple_now && upper == i && i == lower) {
            // All three aligned; common deaths carry the SIRS recovery.
            add(+1, +1, +1, 0, b_lo);
            add(0, +1, +1, 0, b_mid - b_lo);
            add(0, 0, +1, 0, b_up - b_mid);
            add(-1, -1, -1, +1, d_mid);
        } else if (couple_now && upper == i) {
            add(0, +1, +1, 0, b_mid);
            add(0, 0, +1, 0, b_up - b_mid);
            add(0, -1, -1, +1, d_mid);
            add(+1, 0, 0, 0, b_lo);
            add(-1, 0, 0, 0, d_lo);
        } else if (couple_now && i == lower) {
            add(+1, +1, 0, 0, b_lo);
            add(0, +1, 0, 0, b_mid - b_lo);
            add(-1, -1, 0, +1, d_mid);
            add(0, 0, +1, 0, b_up);
            add(0, 0, -1, 0, d_up);
        } else {
            add(0, +1, 0, 0, b_mid);
            add(0, -1, 0, +1, d_mid);
            add(0, 0, +1, 0, b_up);
            add(0, 0, -1, 0, d_up);
            add(+1, 0, 0, 0, b_lo);
            add(-1, 0, 0, 0, d_lo);
        }

        double total = 0.0;
        for (size_t c = 0; c < n_channels; ++c) total += channels[c].rate;
        if (total <= 0.0) {
            if (std::isfinite(stop.t_max)) return finish(TerminalReason::stopped);
            return finish(TerminalReason::absorbed);
        }

        const double sojourn = rng.exponential(total);
        if (t + sojourn >= stop.t_max) return finish(TerminalReason::stopped);
        t += sojourn;

        const double target = rng.uniform() * total;
        double acc = 0.0;
        size_t chosen = n_channels - 1;
        for (size_t c = 0; c < n_channels; ++c) {
            acc += channels[c].rate;
            if (target < acc) {
                chosen = c;
                break;
            }
        }

        lower += channels[chosen].dl;
        i += channels[chosen].di;
        upper += channels[chosen].du;
        r += channels[chosen].dr;
        note();
        ++events;

        joint[0] = lower;
        joint[1] = i;
        joint[2] = upper;
        joint[3] = r;
        if (stop.met(t, joint)) return finish(TerminalReason::stopped);
        if (events >= stop.event_cap) return finish(TerminalReason::capped);
    }
}

}  // namespace sirsim
