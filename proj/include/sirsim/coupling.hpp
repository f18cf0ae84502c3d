#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "sirsim/process.hpp"
#include "sirsim/rng.hpp"
#include "sirsim/ssa.hpp"

namespace sirsim {

// Two birth-death chains on one probability space, the first dominating the
// second: b1(z) >= b2(z) and d1(z) <= d2(z) on every visited state. At equal
// states the chains move through the joint channels
//   (z+1, z)   at b1 - b2     (z+1, z+1) at b2
//   (z-1, z-1) at d1          (z, z-1)   at d2 - d1
// and at unequal states they jump independently off one shared event queue.
// Each marginal keeps its single-chain law, and upper >= lower holds along
// the whole path.
struct CoupledPair {
    std::function<double(int64_t)> upper_birth;
    std::function<double(int64_t)> upper_death;
    std::function<double(int64_t)> lower_birth;
    std::function<double(int64_t)> lower_death;
    int64_t upper_start = 0;
    int64_t lower_start = 0;
};

// Joint paths recorded at every event epoch (both trajectories share the
// same time grid). Dominance is checked lazily at each visited state; a
// violation throws with the offending state in the message.
struct CoupledPaths {
    Trajectory upper;
    Trajectory lower;
    std::optional<double> upper_extinction;  // first time upper == 0
    std::optional<double> lower_extinction;  // first time lower == 0
};

// Stop condition applies to the joint state {upper, lower}.
CoupledPaths simulate_coupled_pair(const CoupledPair& pair, const StopCondition& stop,
                                   RngStream& rng);

// Sandwich of the SIRS infected count between two linear birth-death chains
// with per-head birth rates lower_beta and upper_beta (death rate 1 each).
// Path ordering lower <= I <= upper is guaranteed only while
//   lower_beta <= lambda (1 - (i + r)/N) <= upper_beta
// holds at the visited states; the first failure time is reported and the
// three chains evolve independently afterwards (failures are data, not
// errors). Marginal laws are preserved throughout.
struct SandwichResult {
    Trajectory lower;   // dimension 1
    Trajectory mid;     // infected count of the SIRS chain, dimension 1
    Trajectory upper;   // dimension 1
    std::optional<double> domination_failed_at;
    std::optional<double> lower_extinction;
    std::optional<double> mid_extinction;
    std::optional<double> upper_extinction;
    TerminalReason terminal_reason = TerminalReason::stopped;
};

// Stop condition applies to the joint state {lower, i, upper, r}.
SandwichResult simulate_sirs_sandwich(const SirsParams& params, SirsState state0,
                                      double upper_beta, double lower_beta,
                                      const StopCondition& stop, RngStream& rng);

// Convenience stop for coupled runs: all listed components extinct.
StopCondition all_components_zero(std::vector<int> components);

}  // namespace sirsim
