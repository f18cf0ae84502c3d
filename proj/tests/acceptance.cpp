// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Heavier Monte Carlo settings than the unit suites; expect
// a few minutes of wall time.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "sirsim/analytics.hpp"
#include "sirsim/coupling.hpp"
#include "sirsim/montecarlo.hpp"
#include "sirsim/process.hpp"
#include "sirsim/rng.hpp"
#include "sirsim/ssa.hpp"
#include "sirsim/tau_leap.hpp"
#include "support/oracles.hpp"

using namespace sirsim;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

void parallel_for(int64_t count, const std::function<void(int64_t)>& body) {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int64_t j = next.fetch_add(1);
                if (j >= count) return;
                body(j);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// KS of sorted sample times against a CDF, with an explicit denominator so
// horizon-censored runs (all beyond every observed time) stay accounted for.
double ks_against(const std::vector<double>& sorted_times, double denominator,
                  const std::function<double(double)>& cdf) {
    double ks = 0.0;
    for (size_t k = 0; k < sorted_times.size(); ++k) {
        const double f = cdf(sorted_times[k]);
        ks = std::max(ks, std::fabs(static_cast<double>(k + 1) / denominator - f));
        ks = std::max(ks, std::fabs(static_cast<double>(k) / denominator - f));
    }
    return ks;
}

// The six showcase scaling regimes (the same families the shipped configs
// carry).
struct Showcase {
    const char* name;
    SirsFamily family;
};

std::vector<Showcase> showcases() {
    std::vector<Showcase> out;
    {
        SirsFamily f;
        f.lambda_limit = 1.0; f.lambda_coef = -1.0; f.lambda_exp = 0.5;
        f.gamma_coef = 1.0; f.gamma_exp = 1.0 / 6.0;
        f.i0_coef = 1.0; f.i0_exp = 0.25;
        f.r0_coef = 1.0; f.r0_exp = 0.5;
        out.push_back({"c11_sub", f});
        f.lambda_coef = 1.0;
        out.push_back({"c11_super", f});
    }
    {
        SirsFamily f;
        f.lambda_limit = 1.0; f.lambda_coef = -1.0; f.lambda_exp = 1.0 / 3.0;
        f.gamma_coef = 1.0; f.gamma_exp = 0.25;
        f.i0_coef = 1.0; f.i0_exp = 1.0 / 3.0;
        f.r0_coef = 1.0; f.r0_exp = 1.0 / 3.0;
        out.push_back({"c12", f});
    }
    {
        SirsFamily f;
        f.lambda_limit = 1.0; f.lambda_coef = -1.0; f.lambda_exp = 0.25;
        f.gamma_coef = 1.0; f.gamma_exp = 0.25;
        f.i0_coef = 1.0; f.i0_exp = 1.0 / 3.0;
        f.r0_coef = 1.0; f.r0_exp = 0.5;
        out.push_back({"c13", f});
    }
    {
        SirsFamily f;
        f.lambda_limit = 0.8; f.lambda_coef = -1.0; f.lambda_exp = 0.5;
        f.gamma_coef = 1.0; f.gamma_exp = 5.0 / 12.0;
        f.i0_coef = 30.0; f.i0_exp = 0.0;
        f.r0_macroscopic = true; f.r0_coef = 0.3;
        out.push_back({"c21", f});
    }
    {
        SirsFamily f;
        f.lambda_limit = 1.0; f.lambda_coef = -1.0; f.lambda_exp = 0.25;
        f.gamma_coef = 1.0; f.gamma_exp = 0.5;
        f.i0_coef = 1.0; f.i0_exp = 0.2;
        f.r0_macroscopic = true; f.r0_coef = 0.7;
        out.push_back({"c22", f});
    }
    return out;
}

// ------------------------------------------------------------------
// 1. SSA exactness against the closed-form extinction CDF
// ------------------------------------------------------------------
void criterion_1() {
    ExperimentConfig cfg;
    cfg.model = BdpDirect{BdiParams(0.5, 1.0, 0.0), 5};
    cfg.replications = 100000;
    cfg.master_seed = 101;
    const auto sets = run_experiment(cfg);
    const double ks = ks_against(sets[0].uncensored_times(),
                                 static_cast<double>(cfg.replications),
                                 [](double t) { return bdp_extinction_cdf(0.5, 1.0, 5, t); });
    report(1, "exact-engine extinction CDF vs closed form", ks <= 0.01, "KS = " + fmt(ks));
}

// ------------------------------------------------------------------
// 2. Hitting probabilities vs simulated hit frequencies
// ------------------------------------------------------------------
void criterion_2() {
    const int64_t reps = 100000;
    bool pass = true;
    std::string detail;

    for (double beta : {0.5, 0.9, 1.1}) {
        const auto sys = bdi_system(BdiParams(beta, 1.0, 0.0));
        std::atomic<int64_t> hits{0};
        parallel_for(reps, [&](int64_t j) {
            RngStream rng =
                RngStream::derive(201, static_cast<uint64_t>(std::llround(beta * 100)), j);
            int64_t terminal = 5;
            const auto stop = StopCondition::when([&terminal](double, StateView s) {
                terminal = s[0];
                return s[0] == 0 || s[0] >= 10;
            });
            simulate_extinction(sys, {5}, stop, rng);
            if (terminal >= 10) hits.fetch_add(1);
        });
        const double h = bdp_hit_probability(beta, 5, 10);
        const double freq = static_cast<double>(hits.load()) / static_cast<double>(reps);
        const double band = 4.0 * std::sqrt(h * (1.0 - h) / static_cast<double>(reps));
        if (std::fabs(freq - h) > band) pass = false;
        detail += "bdp(" + fmt(beta) + "): " + fmt(freq) + "~" + fmt(h) + "; ";
    }

    for (double mu : {1.0, 2.0}) {
        for (int64_t level : {3, 5}) {
            const auto sys = bdi_system(BdiParams(0.0, mu, 1.0, true));
            std::atomic<int64_t> hits{0};
            parallel_for(reps, [&](int64_t j) {
                RngStream rng = RngStream::derive(
                    202, static_cast<uint64_t>(std::llround(mu * 10)) + 1000 * level, j);
                int64_t terminal = level;
                const auto stop =
                    StopCondition::when([&terminal, level](double, StateView s) {
                        terminal = s[0];
                        return s[0] == 0 || s[0] >= 2 * level;
                    });
                simulate_extinction(sys, {level}, stop, rng);
                if (terminal >= 2 * level) hits.fetch_add(1);
            });
            const double h = immigration_death_hit_probability(1.0, mu, level);
            const double freq = static_cast<double>(hits.load()) / static_cast<double>(reps);
            const double band = 4.0 * std::sqrt(h * (1.0 - h) / static_cast<double>(reps));
            if (std::fabs(freq - h) > band) pass = false;
            detail += "id(" + fmt(mu) + "," + std::to_string(level) + "): " + fmt(freq) + "~" +
                      fmt(h) + "; ";
        }
    }
    report(2, "hitting probabilities vs simulation (4 binomial SE)", pass, detail);
}

// ------------------------------------------------------------------
// 3. Coupled pairs: order preservation and marginal laws
// ------------------------------------------------------------------
void criterion_3() {
    const int64_t reps = 10000;
    const double horizon = 1000.0;

    CoupledPair pair;
    pair.upper_birth = [](int64_t z) { return static_cast<double>(z); };
    pair.upper_death = [](int64_t z) { return static_cast<double>(z); };
    pair.lower_birth = [](int64_t z) { return 0.5 * static_cast<double>(z); };
    pair.lower_death = [](int64_t z) { return static_cast<double>(z); };
    pair.upper_start = 5;
    pair.lower_start = 5;
    const auto stop = all_components_zero({0, 1}).with_horizon(horizon);

    std::atomic<int64_t> violations{0};
    std::vector<double> upper_times(static_cast<size_t>(reps), -1.0);
    std::vector<double> lower_times(static_cast<size_t>(reps), -1.0);
    parallel_for(reps, [&](int64_t j) {
        RngStream rng = RngStream::derive(301, 0, static_cast<uint64_t>(j));
        const auto paths = simulate_coupled_pair(pair, stop, rng);
        for (size_t k = 0; k < paths.upper.size(); ++k)
            if (paths.upper.state(k)[0] < paths.lower.state(k)[0]) violations.fetch_add(1);
        if (paths.upper_extinction) upper_times[static_cast<size_t>(j)] = *paths.upper_extinction;
        if (paths.lower_extinction) lower_times[static_cast<size_t>(j)] = *paths.lower_extinction;
    });

    std::vector<double> upper_sorted, lower_sorted;
    for (double t : upper_times)
        if (t >= 0.0) upper_sorted.push_back(t);
    for (double t : lower_times)
        if (t >= 0.0) lower_sorted.push_back(t);
    std::sort(upper_sorted.begin(), upper_sorted.end());
    std::sort(lower_sorted.begin(), lower_sorted.end());

    const double ks_upper =
        ks_against(upper_sorted, static_cast<double>(reps),
                   [](double t) { return bdp_extinction_cdf(1.0, 1.0, 5, t); });
    const double ks_lower =
        ks_against(lower_sorted, static_cast<double>(reps),
                   [](double t) { return bdp_extinction_cdf(0.5, 1.0, 5, t); });

    const bool pass = violations.load() == 0 && ks_upper <= 0.02 && ks_lower <= 0.02;
    report(3, "coupled pairs: ordering and marginal laws", pass,
           "violations = " + std::to_string(violations.load()) +
               ", KS upper = " + fmt(ks_upper) + ", KS lower = " + fmt(ks_lower));
}

// ------------------------------------------------------------------
// 4. Occupation integral of a subcritical chain
// ------------------------------------------------------------------
void criterion_4() {
    const int64_t reps = 100000;
    std::vector<double> areas(static_cast<size_t>(reps), 0.0);
    const auto sys = bdi_system(BdiParams(0.5, 1.0, 0.0));
    parallel_for(reps, [&](int64_t j) {
        RngStream rng = RngStream::derive(401, 0, static_cast<uint64_t>(j));
        const auto traj = simulate_trajectory(sys, {5}, StopCondition::component_zero(0), rng);
        double area = 0.0;
        for (size_t k = 1; k < traj.size(); ++k)
            area +=
                static_cast<double>(traj.state(k - 1)[0]) * (traj.times[k] - traj.times[k - 1]);
        areas[static_cast<size_t>(j)] = area;
    });

    double sum = 0.0;
    for (double a : areas) sum += a;
    const double mean = sum / static_cast<double>(reps);
    const double expected = occupation_integral_mean(0.5, 1.0, 5);
    bool pass = std::fabs(mean - expected) <= 0.02 * expected;
    std::string detail = "mean = " + fmt(mean) + " vs " + fmt(expected);

    for (double delta : {20.0, 50.0}) {
        const double bound = occupation_tail_bound(0.5, 1.0, 5, delta);
        int64_t exceed = 0;
        for (double a : areas)
            if (a > delta) ++exceed;
        const double freq = static_cast<double>(exceed) / static_cast<double>(reps);
        const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(reps));
        if (freq > bound + slack) pass = false;
        detail += ", P(H>" + fmt(delta) + ") = " + fmt(freq) + " <= " + fmt(bound);
    }
    report(4, "occupation integral mean and tail bound", pass, detail);
}

// ------------------------------------------------------------------
// 5. Convergence toward the classified limit laws
// ------------------------------------------------------------------
void criterion_5() {
    const int64_t reps = 700;
    const double trend_slack = 2.0 / std::sqrt(static_cast<double>(reps));
    bool all_pass = true;
    std::string detail;

    std::printf("  config     case   ks@1e3   ks@1e4   ks@1e5   ks@1e6(tau)\n");
    for (const auto& sc : showcases()) {
        const auto spec = sc.family.to_scaling_spec();
        const auto label = classify_case(spec);

        ExperimentConfig ssa_cfg;
        ssa_cfg.model = sc.family;
        ssa_cfg.n_values = {1000, 10000, 100000};
        ssa_cfg.replications = reps;
        ssa_cfg.engine = EngineKind::ssa;
        ssa_cfg.master_seed = 501;
        auto sets = run_experiment(ssa_cfg);

        ExperimentConfig tau_cfg = ssa_cfg;
        tau_cfg.n_values = {1000000};
        tau_cfg.engine = EngineKind::tau;
        auto tau_sets = run_experiment(tau_cfg);
        sets.push_back(tau_sets[0]);

        std::vector<double> ks(sets.size());
        for (size_t k = 0; k < sets.size(); ++k) {
            const auto law = law_for_case(label, spec, sets[k].n_pop);
            ks[k] = ks_distance(sets[k], law);
        }
        const bool limit_ok = ks.back() <= 0.1;
        const bool trend_ok = ks.back() <= ks.front() + trend_slack;
        if (!(limit_ok && trend_ok)) all_pass = false;

        std::printf("  %-10s %-6s %-8s %-8s %-8s %-8s %s%s\n", sc.name, label.name().c_str(),
                    fmt(ks[0]).c_str(), fmt(ks[1]).c_str(), fmt(ks[2]).c_str(),
                    fmt(ks[3]).c_str(), limit_ok ? "" : "[limit>0.1] ",
                    trend_ok ? "" : "[trend]");
        std::fflush(stdout);
        if (!limit_ok) detail += std::string(sc.name) + ": ks@1e6 = " + fmt(ks.back()) + "; ";
        if (!trend_ok) detail += std::string(sc.name) + " trend; ";
    }
    if (detail.empty()) detail = "all six configurations within tolerance";
    report(5, "convergence to the classified limit laws", all_pass, detail);
}

// ------------------------------------------------------------------
// 6. Engine agreement and speed
// ------------------------------------------------------------------
void criterion_6() {
    const auto sc = showcases()[0];  // the subcritical vanishing-product regime

    // Agreement at n = 1e5: 1e4 samples per engine.
    const int64_t n_agree = 100000;
    const auto sys = sirs_system(sc.family.params_at(n_agree));
    const auto s0 = sc.family.state_at(n_agree);
    const State state0 = {s0.i, s0.r};
    const auto stop = StopCondition::component_zero(0);
    const int64_t samples = 10000;
    std::vector<double> ssa_times(static_cast<size_t>(samples));
    std::vector<double> tau_times(static_cast<size_t>(samples));
    parallel_for(samples, [&](int64_t j) {
        RngStream r1 = RngStream::derive(601, 0, static_cast<uint64_t>(j));
        RngStream r2 = RngStream::derive(602, 0, static_cast<uint64_t>(j));
        ssa_times[static_cast<size_t>(j)] = simulate_extinction(sys, state0, stop, r1).time;
        tau_times[static_cast<size_t>(j)] =
            simulate_extinction_tau(sys, state0, stop, TauConfig{}, r2).time;
    });
    const double ks = oracles::two_sample_ks(ssa_times, tau_times);

    // Speed at n = 1e6: median wall time of 50 replications per engine.
    const int64_t n_speed = 1000000;
    const auto speed_sys = sirs_system(sc.family.params_at(n_speed));
    const auto speed_s0 = sc.family.state_at(n_speed);
    const State speed_state0 = {speed_s0.i, speed_s0.r};
    const int timing_reps = 50;
    std::vector<double> ssa_ms, tau_ms;
    for (int j = 0; j < timing_reps; ++j) {
        RngStream r1 = RngStream::derive(603, 0, static_cast<uint64_t>(j));
        auto t0 = Clock::now();
        simulate_extinction(speed_sys, speed_state0, stop, r1);
        ssa_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());

        RngStream r2 = RngStream::derive(604, 0, static_cast<uint64_t>(j));
        t0 = Clock::now();
        simulate_extinction_tau(speed_sys, speed_state0, stop, TauConfig{}, r2);
        tau_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    std::sort(ssa_ms.begin(), ssa_ms.end());
    std::sort(tau_ms.begin(), tau_ms.end());
    const double ssa_median = ssa_ms[timing_reps / 2];
    const double tau_median = tau_ms[timing_reps / 2];

    const bool pass = ks <= 0.05 && tau_median < ssa_median;
    report(6, "engine agreement (KS) and tau speed advantage", pass,
           "cross KS = " + fmt(ks) + ", median ms ssa = " + fmt(ssa_median) +
               ", tau = " + fmt(tau_median));
}

// ------------------------------------------------------------------
// 7. Immune-fraction excursion bound
// ------------------------------------------------------------------
void criterion_7() {
    const int64_t n_pop = 100000;
    const double lambda = 0.8;
    const double gamma = 1e-3;
    const int64_t i0 = 30;
    const int64_t r0 = 30000;  // 0.3 N
    const double delta = 0.05;
    const double t1 = 5.0;

    const double bound =
        sirs_recovered_excursion_bound(n_pop, lambda, gamma, i0, 0.3, delta, t1);

    const auto sys = sirs_system(SirsParams(n_pop, lambda, gamma));
    const int64_t reps = 1000;
    std::atomic<int64_t> exceed{0};
    parallel_for(reps, [&](int64_t j) {
        RngStream rng = RngStream::derive(701, 0, static_cast<uint64_t>(j));
        const auto traj =
            simulate_trajectory(sys, {i0, r0}, StopCondition::time_horizon(t1), rng);
        double worst = 0.0;
        for (size_t k = 0; k < traj.size(); ++k)
            worst = std::max(worst, std::fabs(static_cast<double>(traj.state(k)[1] - r0)) /
                                        static_cast<double>(n_pop));
        if (worst > 4.0 * delta) exceed.fetch_add(1);
    });
    const double freq = static_cast<double>(exceed.load()) / static_cast<double>(reps);
    const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(reps));
    report(7, "immune-fraction excursion frequency under the bound", freq <= bound + slack,
           "freq = " + fmt(freq) + " vs bound " + fmt(bound));
}

// ------------------------------------------------------------------
// 8. Classifier fidelity on the showcase regimes
// ------------------------------------------------------------------
void criterion_8() {
    const std::vector<std::string> expected = {"C1_1", "C1_1", "C1_2", "C1_3", "C2_1", "C2_2"};
    const auto cases = showcases();
    bool pass = true;
    std::string detail;
    for (size_t k = 0; k < cases.size(); ++k) {
        const auto label = classify_case(cases[k].family.to_scaling_spec());
        if (label.name() != expected[k]) pass = false;
        detail += std::string(cases[k].name) + "->" + label.name() + " ";
    }
    report(8, "classifier labels the six showcase regimes", pass, detail);
}

// ------------------------------------------------------------------
// 9. Analytic self-consistency
// ------------------------------------------------------------------
void criterion_9() {
    bool pass = true;
    std::string detail;

    double worst_cdf = 0.0;
    for (double beta : {0.2, 0.5, 1.0}) {
        for (double mu : {0.8, 1.0, 1.5}) {
            for (int64_t l0 : {1, 3, 5}) {
                for (double t : {0.5, 1.0, 2.0, 4.0}) {
                    const double diff =
                        std::fabs(bdp_extinction_cdf(beta, mu, l0, t) -
                                  oracles::bdp_extinction_cdf_uniformized(beta, mu, l0, t));
                    worst_cdf = std::max(worst_cdf, diff);
                }
            }
        }
    }
    if (worst_cdf > 1e-8) pass = false;
    detail += "cdf vs uniformisation: " + fmt(worst_cdf);

    double worst_hit = 0.0;
    for (double beta : {0.1, 0.5, 0.9, 1.0, 1.1, 2.0}) {
        for (int64_t barrier : {10, 37, 60}) {
            const auto oracle = oracles::hitting_probabilities_tridiagonal(
                [beta](int64_t) { return beta; }, [](int64_t) { return 1.0; }, barrier);
            for (int64_t start = 0; start <= barrier; ++start)
                worst_hit = std::max(worst_hit,
                                     std::fabs(bdp_hit_probability(beta, start, barrier) -
                                               oracle[static_cast<size_t>(start)]));
        }
    }
    for (double ratio : {0.1, 0.5, 0.9, 1.0, 1.1, 2.0}) {
        for (int64_t level : {2, 7, 15}) {
            const auto oracle = oracles::hitting_probabilities_tridiagonal(
                [](int64_t) { return 1.0; },
                [ratio](int64_t i) { return ratio * static_cast<double>(i); }, 2 * level);
            worst_hit = std::max(
                worst_hit, std::fabs(immigration_death_hit_probability(1.0, ratio, level) -
                                     oracle[static_cast<size_t>(level)]));
        }
    }
    if (worst_hit > 1e-10) pass = false;
    detail += ", hitting vs linear system: " + fmt(worst_hit);

    double worst_cont = 0.0;
    for (double beta : {1.0 - 1e-8, 1.0 + 1e-8})
        worst_cont = std::max(worst_cont, std::fabs(bdp_hit_probability(beta, 3, 6) - 0.5));
    if (worst_cont > 1e-6) pass = false;
    detail += ", continuity at beta=1: " + fmt(worst_cont);

    report(9, "analytic self-consistency", pass, detail);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    const double minutes = std::chrono::duration<double>(Clock::now() - t0).count() / 60.0;
    std::printf("%d of 9 criteria failed (%.1f minutes)\n", failures, minutes);
    return failures;
}
