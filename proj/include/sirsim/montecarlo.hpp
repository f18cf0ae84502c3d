#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sirsim/analytics.hpp"
#include "sirsim/process.hpp"
#include "sirsim/ssa.hpp"
#include "sirsim/tau_leap.hpp"

namespace sirsim {

enum class EngineKind { ssa, tau };

const char* to_string(EngineKind engine);

// SIRS family parameterised by population size:
//   lambda(N) = lambda_limit + lambda_coef * N^(-lambda_exp)
//   gamma(N)  = gamma_coef * N^(-gamma_exp)
//   I0(N)     = ceil(i0_coef * N^i0_exp)
//   R0(N)     = ceil(r0_coef * N^r0_exp), or round(r0_frac * N) if macroscopic
// The extra constant term in lambda covers families like 0.8 - N^(-1/2);
// classification uses the leading order of 1 - lambda(N).
struct SirsFamily {
    double lambda_limit = 1.0;
    double lambda_coef = 0.0;  // signed
    double lambda_exp = 0.0;
    double gamma_coef = 1.0;
    double gamma_exp = 0.0;
    double i0_coef = 1.0;
    double i0_exp = 0.0;
    bool r0_macroscopic = false;
    double r0_coef = 1.0;
    double r0_exp = 0.0;

    double lambda_at(int64_t n) const;
    double gamma_at(int64_t n) const;
    int64_t i0_at(int64_t n) const;
    int64_t r0_at(int64_t n) const;

    SirsParams params_at(int64_t n) const;
    SirsState state_at(int64_t n) const;
    ScalingSpec to_scaling_spec() const;
};

// Fixed-size models for experiments that do not scan N.
struct SirsDirect {
    SirsParams params;
    SirsState state0;
};

struct BdpDirect {
    BdiParams params;
    int64_t l0 = 1;
};

using ModelSpec = std::variant<SirsFamily, SirsDirect, BdpDirect>;

struct ExperimentConfig {
    ModelSpec model;
    std::vector<int64_t> n_values;  // used by SirsFamily; must be strictly increasing
    int64_t replications = 700;
    EngineKind engine = EngineKind::ssa;
    TauConfig tau;
    uint64_t master_seed = 1;
    double time_horizon = std::numeric_limits<double>::infinity();  // censor horizon
    uint64_t event_cap = 1'000'000'000;
    int workers = 0;  // 0: hardware concurrency

    void validate() const;
    uint64_t fingerprint() const;
};

struct Sample {
    int64_t replication = 0;
    double time = 0.0;
    TerminalReason reason = TerminalReason::stopped;

    bool operator==(const Sample&) const = default;
};

// Extinction-time samples for one population size, sorted ascending by time.
// Samples that hit the event cap or the censor horizon are flagged and
// excluded from CDF estimates; their count is always reported.
struct SampleSet {
    int64_t n_pop = 0;
    std::vector<Sample> samples;
    uint64_t config_fingerprint = 0;
    uint64_t master_seed = 0;
    std::string engine;
    double censor_horizon = std::numeric_limits<double>::infinity();

    bool censored(const Sample& s) const;
    std::vector<double> uncensored_times() const;
    int64_t censored_count() const;

    bool operator==(const SampleSet&) const = default;
};

// Runs replications of the configured model on the configured engine, one
// SampleSet per population size. Replication j of size index k draws its
// stream from (master_seed, k, j), so results are identical for any worker
// count and execution order. A failed replication aborts the experiment.
std::vector<SampleSet> run_experiment(const ExperimentConfig& cfg);

// Right-continuous empirical CDF over the uncensored samples.
double empirical_cdf(const SampleSet& samples, double t);

// sup_t |F_hat(t) - F_law(t)|, evaluated at both sides of every sample step.
// Requires at least 30 uncensored samples.
double ks_distance(const SampleSet& samples, const AsymptoticLaw& law);

// Two-sample KS distance between uncensored sample sets.
double ks_two_sample(const SampleSet& a, const SampleSet& b);

struct Histogram {
    std::vector<double> edges;        // bin_count + 1 entries
    std::vector<double> density;      // mass per bin; sums to <= 1
    std::vector<double> cumulative;   // fraction of samples <= edge; nondecreasing, <= 1
};

struct NReport {
    int64_t n_pop = 0;
    int64_t sample_count = 0;
    int64_t censored = 0;
    double ks = std::numeric_limits<double>::quiet_NaN();  // NaN when no law was assigned
    std::vector<double> quantiles;  // 1%..99%
    Histogram histogram;            // 40 bins over the [0.5%, 99.5%] quantile range
};

struct ComparisonReport {
    uint64_t config_fingerprint = 0;
    uint64_t master_seed = 0;
    std::vector<NReport> per_n;
    std::vector<std::string> warnings;
};

NReport build_report(const SampleSet& samples);  // quantiles and histogram only
NReport build_report(const SampleSet& samples, const AsymptoticLaw& law);

// CSV of raw times (columns: replication_index, n_pop, extinction_time,
// terminal_reason, engine) plus a JSON summary carrying the fingerprint and
// seed for exact replay. When the summary path already holds results for a
// different fingerprint, a warning is recorded in the new summary.
void write_results(const std::vector<SampleSet>& sets, const ComparisonReport& report,
                   const std::string& csv_path, const std::string& summary_path);

// Reads back what write_results produced. Returns one SampleSet per n.
std::vector<SampleSet> load_results(const std::string& csv_path,
                                    const std::string& summary_path);

}  // namespace sirsim
