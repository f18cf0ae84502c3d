#include "sirsim/process.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sirsim {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

SirsParams::SirsParams(int64_t n_pop_, double lambda_, double gamma_)
    : n_pop(n_pop_), lambda(lambda_), gamma(gamma_) {
    if (n_pop < 1) throw std::invalid_argument("SirsParams: n_pop must be >= 1");
    if (!std::isfinite(lambda) || lambda <= 0.0)
        throw std::invalid_argument("SirsParams: lambda must be > 0");
    if (!std::isfinite(gamma) || gamma <= 0.0)
        throw std::invalid_argument("SirsParams: gamma must be > 0");
}

BdiParams::BdiParams(double beta_, double mu_, double alpha_, bool absorb_at_zero_)
    : beta(beta_), mu(mu_), alpha(alpha_), absorb_at_zero(absorb_at_zero_) {
    if (!finite_nonneg(beta) || !finite_nonneg(mu) || !finite_nonneg(alpha))
        throw std::invalid_argument("BdiParams: rates must be finite and >= 0");
    if (beta == 0.0 && mu == 0.0 && alpha == 0.0)
        throw std::invalid_argument("BdiParams: at least one rate must be positive");
}

int64_t Reaction::max_firings(StateView state) const {
    if (has_exhaustion_override) {
        int64_t bound = exhaust_const;
        for (size_t d = 0; d < exhaust_coef.size(); ++d) bound += exhaust_coef[d] * state[d];
        return bound;
    }
    int64_t bound = std::numeric_limits<int64_t>::max();
    for (size_t d = 0; d < delta.size(); ++d)
        if (delta[d] < 0) bound = std::min(bound, state[d] / -delta[d]);
    return bound;
}

double ReactionSystem::total_propensity(StateView state) const {
    double total = 0.0;
    for (const auto& reaction : reactions) total += reaction.propensity(state);
    return total;
}

ReactionSystem sirs_system(const SirsParams& params) {
    const int64_t n = params.n_pop;
    const double lambda = params.lambda;
    const double gamma = params.gamma;

    ReactionSystem sys;
    sys.dimension = 2;
    sys.feasible = [n](StateView s) {
        return s[0] >= 0 && s[1] >= 0 && s[0] + s[1] <= n;
    };

    // Infection: (i, r) -> (i+1, r). The division by N happens at evaluation
    // time so the rate is exactly 0 on the boundary i + r = N. The exhausted
    // reactant is the implicit susceptible count N - i - r.
    Reaction infection;
    infection.delta = {1, 0};
    infection.propensity = [n, lambda](StateView s) {
        return lambda * static_cast<double>(n - s[0] - s[1]) *
               static_cast<double>(s[0]) / static_cast<double>(n);
    };
    infection.has_exhaustion_override = true;
    infection.exhaust_const = n;
    infection.exhaust_coef = {-1, -1};

    // Recovery: (i, r) -> (i-1, r+1).
    Reaction recovery;
    recovery.delta = {-1, 1};
    recovery.propensity = [](StateView s) { return static_cast<double>(s[0]); };

    // Immunity loss: (i, r) -> (i, r-1).
    Reaction loss;
    loss.delta = {0, -1};
    loss.propensity = [gamma](StateView s) {
        return gamma * static_cast<double>(s[1]);
    };

    sys.reactions = {std::move(infection), std::move(recovery), std::move(loss)};
    return sys;
}

ReactionSystem bdi_system(const BdiParams& params) {
    const double beta = params.beta;
    const double mu = params.mu;
    const double alpha = params.alpha;
    const bool absorb = params.absorb_at_zero;

    ReactionSystem sys;
    sys.dimension = 1;
    sys.feasible = [](StateView s) { return s[0] >= 0; };

    Reaction up;
    up.delta = {1};
    up.propensity = [beta, alpha, absorb](StateView s) {
        if (absorb && s[0] == 0) return 0.0;
        return beta * static_cast<double>(s[0]) + alpha;
    };

    Reaction down;
    down.delta = {-1};
    down.propensity = [mu](StateView s) { return mu * static_cast<double>(s[0]); };

    sys.reactions = {std::move(up), std::move(down)};
    return sys;
}

}  // namespace sirsim
