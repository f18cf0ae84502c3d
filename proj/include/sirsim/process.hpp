#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sirsim {

using State = std::vector<int64_t>;
using StateView = std::span<const int64_t>;

// Closed-population SIRS parameters: contact rate lambda, per-capita recovery
// rate 1, immunity-loss rate gamma. gamma must be strictly positive.
struct SirsParams {
    int64_t n_pop;
    double lambda;
    double gamma;

    SirsParams(int64_t n_pop, double lambda, double gamma);
};

// Counts of infected and recovered individuals; susceptibles are implicit
// (N - i - r).
struct SirsState {
    int64_t i = 0;
    int64_t r = 0;
};

// Linear birth-death-immigration chain: x -> x+1 at beta*x + alpha,
// x -> x-1 at mu*x. With absorb_at_zero the chain is frozen at 0 even when
// alpha > 0 would otherwise push it back up.
struct BdiParams {
    double beta = 0.0;
    double mu = 0.0;
    double alpha = 0.0;
    bool absorb_at_zero = false;

    BdiParams(double beta, double mu, double alpha, bool absorb_at_zero = false);
};

struct Reaction {
    std::vector<int64_t> delta;                   // stoichiometry
    std::function<double(StateView)> propensity;  // 0 whenever firing would leave the state space

    // Firings until some reactant is exhausted. By default this is the bound
    // implied by the negative stoichiometry components; reactions that drain
    // an implicit reactant (susceptibles, say) override it with a linear form
    // exhaust_const + exhaust_coef . state.
    bool has_exhaustion_override = false;
    int64_t exhaust_const = 0;
    std::vector<int64_t> exhaust_coef;

    int64_t max_firings(StateView state) const;
};

// Uniform model form consumed by both engines and the coupler. Propensities
// enforce the feasible set themselves: any reaction that would escape it has
// rate 0, exactly as in the chain's definition.
struct ReactionSystem {
    int dimension = 0;
    std::vector<Reaction> reactions;
    std::function<bool(StateView)> feasible;

    double total_propensity(StateView state) const;
};

// SIRS transitions on (i, r): infection (+1,0), recovery (-1,+1),
// immunity loss (0,-1).
ReactionSystem sirs_system(const SirsParams& params);

// Birth-death-immigration transitions on (x): up (+1), down (-1).
ReactionSystem bdi_system(const BdiParams& params);

}  // namespace sirsim
