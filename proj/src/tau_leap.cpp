#include "sirsim/tau_leap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sirsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StepOutcome {
    double t;
    uint64_t events;
    bool terminated;
    SimResult result;
};

// Executes exact direct-method steps; used both as the small-step fallback
// and whenever every active reaction is critical.
StepOutcome run_exact_steps(const ReactionSystem& system, State& state, double t,
                            uint64_t events, int64_t max_steps, const StopCondition& stop,
                            RngStream& rng, std::vector<double>& propensity) {
    const size_t n_reactions = system.reactions.size();
    for (int64_t step = 0; step < max_steps; ++step) {
        double total = 0.0;
        for (size_t j = 0; j < n_reactions; ++j) {
            propensity[j] = system.reactions[j].propensity(state);
            total += propensity[j];
        }
        if (total <= 0.0) {
            if (std::isfinite(stop.t_max))
                return {stop.t_max, events, true, {stop.t_max, TerminalReason::stopped}};
            return {t, events, true, {t, TerminalReason::absorbed}};
        }
        const double sojourn = rng.exponential(total);
        if (t + sojourn >= stop.t_max)
            return {stop.t_max, events, true, {stop.t_max, TerminalReason::stopped}};
        t += sojourn;

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
        const auto& delta = system.reactions[chosen].delta;
        for (size_t d = 0; d < delta.size(); ++d) state[d] += delta[d];
        ++events;

        if (stop.met(t, state)) return {t, events, true, {t, TerminalReason::stopped}};
        if (events >= stop.event_cap) return {t, events, true, {t, TerminalReason::capped}};
    }
    return {t, events, false, {}};
}

}  // namespace

void TauConfig::validate() const {
    if (n_c < 1) throw std::invalid_argument("TauConfig: n_c must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("TauConfig: epsilon must lie in (0, 1)");
    if (ssa_fallback_steps < 1)
        throw std::invalid_argument("TauConfig: ssa_fallback_steps must be >= 1");
    if (!(ssa_switch_multiple > 0.0))
        throw std::invalid_argument("TauConfig: ssa_switch_multiple must be > 0");
    if (max_halvings < 1) throw std::invalid_argument("TauConfig: max_halvings must be >= 1");
}

SimResult simulate_extinction_tau(const ReactionSystem& system, State state,
                                  const StopCondition& stop, const TauConfig& cfg,
                                  RngStream& rng, EngineCounters* counters) {
    cfg.validate();
    if (!system.feasible(state))
        throw std::invalid_argument("simulate_extinction_tau: initial state infeasible");

    const size_t n_reactions = system.reactions.size();
    const size_t dim = static_cast<size_t>(system.dimension);

    std::vector<double> propensity(n_reactions);
    std::vector<double> mu(n_reactions);
    std::vector<double> sigma2(n_reactions);
    std::vector<bool> critical(n_reactions);
    std::vector<uint64_t> firings(n_reactions);
    State probe(dim);
    State proposal(dim);

    double t = 0.0;
    uint64_t events = 0;
    uint64_t steps = 0;

    const auto finish = [&](SimResult r) {
        if (counters) {
            counters->events = events;
            counters->steps = steps;
        }
        return r;
    };

    if (stop.met(t, state)) return finish({t, TerminalReason::stopped});

    for (;;) {
        double total = 0.0;
        for (size_t j = 0; j < n_reactions; ++j) {
            propensity[j] = system.reactions[j].propensity(state);
            total += propensity[j];
        }
        if (total <= 0.0) {
            if (std::isfinite(stop.t_max)) return finish({stop.t_max, TerminalReason::stopped});
            return finish({t, TerminalReason::absorbed});
        }

        // Split reactions into critical (within n_c firings of exhausting a
        // reactant) and leap candidates.
        double critical_total = 0.0;
        bool any_noncritical = false;
        for (size_t j = 0; j < n_reactions; ++j) {
            if (propensity[j] <= 0.0) {
                critical[j] = false;
                continue;
            }
            critical[j] = system.reactions[j].max_firings(state) < cfg.n_c;
            if (critical[j])
                critical_total += propensity[j];
            else
                any_noncritical = true;
        }

        if (!any_noncritical) {
            // Everything active is critical; a block of exact steps realises
            // the one-at-a-time exponential clocks directly.
            auto block = run_exact_steps(system, state, t, events, cfg.ssa_fallback_steps,
                                         stop, rng, propensity);
            steps += block.events - events;
            t = block.t;
            events = block.events;
            if (block.terminated) return finish(block.result);
            continue;
        }

        // Leap-size selection: bound the expected propensity change caused by
        // the noncritical bundle, |Delta a_j| <= epsilon a0 for every j, via
        //   mu_j = sum_k f_jk a_k,  sigma2_j = sum_k f_jk^2 a_k
        // over noncritical k, where f_jk is the change of propensity j from
        // one firing of reaction k, measured by evaluation.
        const double bound = cfg.epsilon * total;
        std::fill(mu.begin(), mu.end(), 0.0);
        std::fill(sigma2.begin(), sigma2.end(), 0.0);
        for (size_t k = 0; k < n_reactions; ++k) {
            if (critical[k] || propensity[k] <= 0.0) continue;
            probe = state;
            for (size_t d = 0; d < dim; ++d) probe[d] += system.reactions[k].delta[d];
            for (size_t j = 0; j < n_reactions; ++j) {
                const double f_jk = system.reactions[j].propensity(probe) - propensity[j];
                mu[j] += f_jk * propensity[k];
                sigma2[j] += f_jk * f_jk * propensity[k];
            }
        }
        double tau_prime = kInf;
        for (size_t j = 0; j < n_reactions; ++j) {
            if (mu[j] != 0.0) tau_prime = std::min(tau_prime, bound / std::fabs(mu[j]));
            if (sigma2[j] != 0.0) tau_prime = std::min(tau_prime, bound * bound / sigma2[j]);
        }

        if (tau_prime < cfg.ssa_switch_multiple / total) {
            auto block = run_exact_steps(system, state, t, events, cfg.ssa_fallback_steps,
                                         stop, rng, propensity);
            steps += block.events - events;
            t = block.t;
            events = block.events;
            if (block.terminated) return finish(block.result);
            continue;
        }

        int halvings = 0;
        for (;;) {
            // Exact exponential clock for the next critical firing, redrawn
            // on every halve-and-retry pass.
            const double tau_critical =
                critical_total > 0.0 ? rng.exponential(critical_total) : kInf;
            double tau = std::min(tau_prime, tau_critical);
            bool fire_critical = tau_critical <= tau_prime;
            if (t + tau >= stop.t_max) {
                tau = stop.t_max - t;
                fire_critical = false;
            }
            if (!std::isfinite(tau)) {
                // Constant-propensity system with no critical clock and no
                // horizon; advance by a block's worth of expected firings so
                // the event cap can still bind.
                tau = static_cast<double>(cfg.ssa_fallback_steps) / total;
                fire_critical = false;
            }

            proposal = state;
            uint64_t fired = 0;
            uint64_t bundled = 0;
            for (size_t k = 0; k < n_reactions; ++k) {
                firings[k] = 0;
                if (critical[k] || propensity[k] <= 0.0) continue;
                firings[k] = rng.poisson(propensity[k] * tau);
                bundled += firings[k];
                if (firings[k] != 0) {
                    const auto& delta = system.reactions[k].delta;
                    for (size_t d = 0; d < dim; ++d)
                        proposal[d] += delta[d] * static_cast<int64_t>(firings[k]);
                }
            }
            fired = bundled;
            if (fire_critical) {
                const double target = rng.uniform() * critical_total;
                double acc = 0.0;
                size_t chosen = n_reactions;
                for (size_t j = 0; j < n_reactions; ++j) {
                    if (!critical[j]) continue;
                    acc += propensity[j];
                    chosen = j;
                    if (target < acc) break;
                }
                const auto& delta = system.reactions[chosen].delta;
                for (size_t d = 0; d < dim; ++d) proposal[d] += delta[d];
                ++fired;
            }

            // An empty bundle plus at most one firing of a positive-propensity
            // reaction cannot leave the state space (rates vanish on the
            // boundary), so only mixed proposals need the feasibility test.
            if (bundled != 0 && !system.feasible(proposal)) {
                // Reject and retry with a smaller leap.
                tau_prime /= 2.0;
                if (++halvings > cfg.max_halvings)
                    throw std::runtime_error(
                        "simulate_extinction_tau: leap halving budget exhausted");
                if (tau_prime < cfg.ssa_switch_multiple / total) break;  // fall back below
                continue;
            }

            t += tau;
            state = proposal;
            events += fired;
            ++steps;
            halvings = -1;  // marks acceptance
            break;
        }
        if (halvings >= 0) {
            // Leap abandoned after repeated rejections; take exact steps.
            auto block = run_exact_steps(system, state, t, events, cfg.ssa_fallback_steps,
                                         stop, rng, propensity);
            steps += block.events - events;
            t = block.t;
            events = block.events;
            if (block.terminated) return finish(block.result);
            continue;
        }

        if (stop.met(t, state)) return finish({t, TerminalReason::stopped});
        if (events >= stop.event_cap) return finish({t, TerminalReason::capped});
    }
}

}  // namespace sirsim
