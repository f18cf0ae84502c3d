#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config_file.hpp"
#include "sirsim/analytics.hpp"
#include "sirsim/montecarlo.hpp"

using namespace sirsim;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

struct CommonFlags {
    std::string config_path;
    int64_t seed = -1;  // -1: keep the config's seed
    int workers = -1;
    std::string engine;
    std::string out_dir;
};

void apply_overrides(cli::LoadedExperiment& loaded, const CommonFlags& flags) {
    for (const auto& warning : loaded.warnings)
        std::cerr << "warning: " << warning << '\n';
    if (flags.seed >= 0) loaded.config.master_seed = static_cast<uint64_t>(flags.seed);
    if (flags.workers >= 0) loaded.config.workers = flags.workers;
    if (!flags.engine.empty()) {
        if (flags.engine == "ssa")
            loaded.config.engine = EngineKind::ssa;
        else if (flags.engine == "tau")
            loaded.config.engine = EngineKind::tau;
        else
            throw std::invalid_argument("--engine must be ssa or tau");
    }
    if (!flags.out_dir.empty()) {
        std::filesystem::create_directories(flags.out_dir);
        const auto dir = std::filesystem::path(flags.out_dir);
        loaded.csv_path = (dir / std::filesystem::path(loaded.csv_path).filename()).string();
        loaded.summary_path =
            (dir / std::filesystem::path(loaded.summary_path).filename()).string();
    }
}

// Law assignment for a family experiment; empty when the model is not a
// scaling family or no case applies.
std::optional<std::pair<CaseLabel, ScalingSpec>> classified_family(const ExperimentConfig& cfg) {
    const auto* family = std::get_if<SirsFamily>(&cfg.model);
    if (family == nullptr) return std::nullopt;
    const ScalingSpec spec = family->to_scaling_spec();
    const CaseLabel label = classify_case(spec);
    if (!label.is_case()) return std::nullopt;
    return std::make_pair(label, spec);
}

int cmd_simulate(const CommonFlags& flags) {
    auto loaded = cli::load_experiment(flags.config_path);
    apply_overrides(loaded, flags);

    const auto sets = run_experiment(loaded.config);
    const auto classified = classified_family(loaded.config);

    ComparisonReport report;
    report.config_fingerprint = loaded.config.fingerprint();
    report.master_seed = loaded.config.master_seed;
    for (const auto& set : sets) {
        if (classified) {
            const auto law = law_for_case(classified->first, classified->second, set.n_pop);
            report.per_n.push_back(build_report(set, law));
        } else {
            report.per_n.push_back(build_report(set));
        }
    }
    write_results(sets, report, loaded.csv_path, loaded.summary_path);

    std::cout << "engine " << sets.front().engine << ", seed " << loaded.config.master_seed
              << ", " << loaded.config.replications << " replications\n";
    for (const auto& entry : report.per_n) {
        std::cout << "n=" << entry.n_pop << "  samples=" << entry.sample_count
                  << "  censored=" << entry.censored << "  median=" << num(entry.quantiles[49]);
        if (std::isfinite(entry.ks)) std::cout << "  ks=" << num(entry.ks);
        std::cout << '\n';
    }
    std::cout << "wrote " << loaded.csv_path << " and " << loaded.summary_path << '\n';
    return 0;
}

int cmd_compare(const CommonFlags& flags) {
    auto loaded = cli::load_experiment(flags.config_path);
    apply_overrides(loaded, flags);

    const auto* family = std::get_if<SirsFamily>(&loaded.config.model);
    if (family == nullptr)
        throw std::invalid_argument("compare: config must use model.kind = sirs_family");
    const ScalingSpec spec = family->to_scaling_spec();
    const auto detail = classify_case_detailed(spec);
    std::cout << "classified case: " << detail.label.name() << '\n';
    if (!detail.label.is_case())
        throw std::invalid_argument("compare: no limit law for label " + detail.label.name() +
                                    " (" + detail.label.reason + ")");

    const auto sets = run_experiment(loaded.config);
    ComparisonReport report;
    report.config_fingerprint = loaded.config.fingerprint();
    report.master_seed = loaded.config.master_seed;

    std::cout << "n           ks        samples  censored\n";
    for (const auto& set : sets) {
        const auto law = law_for_case(detail.label, spec, set.n_pop);
        auto entry = build_report(set, law);
        std::printf("%-11lld %-9s %-8lld %lld\n", static_cast<long long>(entry.n_pop),
                    num(entry.ks).c_str(), static_cast<long long>(entry.sample_count),
                    static_cast<long long>(entry.censored));
        report.per_n.push_back(std::move(entry));
    }
    write_results(sets, report, loaded.csv_path, loaded.summary_path);
    std::cout << "wrote " << loaded.csv_path << " and " << loaded.summary_path << '\n';
    return 0;
}

int cmd_classify(const CommonFlags& flags, const ScalingSpec& spec_args, bool from_flags) {
    ScalingSpec spec;
    if (!flags.config_path.empty()) {
        const auto loaded = cli::load_experiment(flags.config_path);
        const auto* family = std::get_if<SirsFamily>(&loaded.config.model);
        if (family == nullptr)
            throw std::invalid_argument("classify: config must use model.kind = sirs_family");
        spec = family->to_scaling_spec();
    } else if (from_flags) {
        spec = spec_args;
    } else {
        throw std::invalid_argument("classify: provide --config or the scaling flags");
    }

    const auto detail = classify_case_detailed(spec);
    std::cout << detail.label.name() << '\n';
    if (!detail.label.reason.empty()) std::cout << "  reason: " << detail.label.reason << '\n';
    for (const auto& check : detail.checks) {
        const char* mark = check.satisfied ? "ok" : (check.marginal ? "margin" : "fail");
        std::cout << "  [" << mark << "] " << check.text << '\n';
    }
    return 0;
}

int cmd_law(const std::string& shape, int64_t i0, double a, double scale, double shift,
            const std::vector<double>& w_values) {
    AsymptoticLaw law;
    if (shape == "finite-start")
        law = AsymptoticLaw::finite_start(i0);
    else if (shape == "growing-start")
        law = AsymptoticLaw::growing_start(1.0);
    else if (shape == "finite-start-gap")
        law = AsymptoticLaw::finite_start_gap(a, i0);
    else if (shape == "growing-start-gap")
        law = AsymptoticLaw::growing_start_gap(a, 1.0);
    else if (shape == "gumbel")
        law = AsymptoticLaw::gumbel(1.0, 0.0);
    else
        throw std::invalid_argument("law: unknown shape " + shape);
    law.time_scale = scale;
    law.time_shift = shift;

    for (double w : w_values)
        std::cout << "w=" << num(w) << "  cdf=" << num(law.standard_cdf(w)) << '\n';
    return 0;
}

int cmd_hitprob(const std::string& kind, double beta, int64_t start, int64_t barrier,
                double alpha, double mu, int64_t level, double t0) {
    if (kind == "linear-bdp") {
        std::cout << num(bdp_hit_probability(beta, start, barrier)) << '\n';
    } else if (kind == "immig-death") {
        std::cout << num(immigration_death_hit_probability(alpha, mu, level)) << '\n';
    } else if (kind == "immig-death-timed") {
        std::cout << num(immigration_death_timed_hit_bound(alpha, mu, level, t0)) << '\n';
    } else {
        throw std::invalid_argument("hitprob: unknown kind " + kind);
    }
    return 0;
}

int cmd_bench(const CommonFlags& flags, int64_t n, int timing_reps, int samples) {
    auto loaded = cli::load_experiment(flags.config_path);
    apply_overrides(loaded, flags);
    auto* family = std::get_if<SirsFamily>(&loaded.config.model);
    if (family == nullptr)
        throw std::invalid_argument("bench: config must use model.kind = sirs_family");

    const auto sys = sirs_system(family->params_at(n));
    const auto s0 = family->state_at(n);
    const State state0 = {s0.i, s0.r};
    StopCondition stop = StopCondition::component_zero(0).with_event_cap(loaded.config.event_cap);
    const TauConfig tau_cfg = loaded.config.tau;
    const uint64_t seed = loaded.config.master_seed;

    using Clock = std::chrono::steady_clock;
    std::vector<double> ssa_ms, tau_ms;
    uint64_t ssa_events = 0, tau_steps = 0;
    for (int j = 0; j < timing_reps; ++j) {
        EngineCounters c;
        RngStream r1 = RngStream::derive(seed, 1, static_cast<uint64_t>(j));
        auto t0 = Clock::now();
        simulate_extinction(sys, state0, stop, r1, &c);
        ssa_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        ssa_events += c.events;

        RngStream r2 = RngStream::derive(seed, 2, static_cast<uint64_t>(j));
        auto t1 = Clock::now();
        simulate_extinction_tau(sys, state0, stop, tau_cfg, r2, &c);
        tau_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t1).count());
        tau_steps += c.steps;
    }
    std::sort(ssa_ms.begin(), ssa_ms.end());
    std::sort(tau_ms.begin(), tau_ms.end());
    const double ssa_median = ssa_ms[ssa_ms.size() / 2];
    const double tau_median = tau_ms[tau_ms.size() / 2];

    std::vector<double> ssa_times, tau_times;
    for (int j = 0; j < samples; ++j) {
        RngStream r1 = RngStream::derive(seed, 3, static_cast<uint64_t>(j));
        RngStream r2 = RngStream::derive(seed, 4, static_cast<uint64_t>(j));
        ssa_times.push_back(simulate_extinction(sys, state0, stop, r1).time);
        tau_times.push_back(simulate_extinction_tau(sys, state0, stop, tau_cfg, r2).time);
    }
    std::sort(ssa_times.begin(), ssa_times.end());
    std::sort(tau_times.begin(), tau_times.end());
    double ks = 0.0;
    size_t ia = 0, ib = 0;
    const double ns = samples;
    while (ia < ssa_times.size() && ib < tau_times.size()) {
        const double x = std::min(ssa_times[ia], tau_times[ib]);
        while (ia < ssa_times.size() && ssa_times[ia] <= x) ++ia;
        while (ib < tau_times.size() && tau_times[ib] <= x) ++ib;
        ks = std::max(ks,
                      std::fabs(static_cast<double>(ia) / ns - static_cast<double>(ib) / ns));
    }

    std::cout << "n=" << n << "  timing reps=" << timing_reps << "  samples=" << samples << '\n';
    std::cout << "engine  median_ms   work\n";
    std::cout << "ssa     " << num(ssa_median) << "      " << ssa_events << " events\n";
    std::cout << "tau     " << num(tau_median) << "      " << tau_steps << " steps\n";
    std::cout << "speedup(median) = " << num(ssa_median / tau_median) << '\n';
    std::cout << "cross-engine ks = " << num(ks) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic SIRS and birth-death extinction-time toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    ScalingSpec spec_args;
    int gap_sign = 1;
    std::vector<double> w_values;
    double w_min = 0.0, w_max = 0.0;
    int w_points = 0;

    auto* simulate = app.add_subcommand("simulate", "run an experiment and write results");
    simulate->add_option("--config", flags.config_path, "experiment config file")->required();
    simulate->add_option("--seed", flags.seed, "override the master seed");
    simulate->add_option("--workers", flags.workers, "override the worker count");
    simulate->add_option("--engine", flags.engine, "override the engine (ssa|tau)");
    simulate->add_option("--out", flags.out_dir, "redirect output files to this directory");

    auto* compare = app.add_subcommand(
        "compare", "simulate and report distance to the classified limit law");
    compare->add_option("--config", flags.config_path, "experiment config file")->required();
    compare->add_option("--seed", flags.seed, "override the master seed");
    compare->add_option("--workers", flags.workers, "override the worker count");
    compare->add_option("--engine", flags.engine, "override the engine (ssa|tau)");
    compare->add_option("--out", flags.out_dir, "redirect output files to this directory");

    auto* classify = app.add_subcommand("classify", "label a scaling regime");
    classify->add_option("--config", flags.config_path, "config with model.kind = sirs_family");
    classify->add_option("--gap-sign", gap_sign, "+1 for lambda < 1, -1 for lambda > 1");
    auto* gap_coef_opt =
        classify->add_option("--gap-coef", spec_args.gap_coef, "|1 - lambda| coefficient");
    classify->add_option("--gap-exp", spec_args.gap_exp, "|1 - lambda| = coef * N^-exp");
    classify->add_option("--gamma-coef", spec_args.gamma_coef, "gamma coefficient");
    classify->add_option("--gamma-exp", spec_args.gamma_exp, "gamma = coef * N^-exp");
    classify->add_option("--i0-coef", spec_args.i0_coef, "I0 coefficient");
    classify->add_option("--i0-exp", spec_args.i0_exp, "I0 = ceil(coef * N^exp)");
    classify->add_flag("--r0-fraction", spec_args.r0_macroscopic,
                       "interpret --r0-coef as a fraction of N");
    classify->add_option("--r0-coef", spec_args.r0_coef, "R0 coefficient or fraction");
    classify->add_option("--r0-exp", spec_args.r0_exp, "R0 = ceil(coef * N^exp)");

    auto* law = app.add_subcommand("law", "evaluate a limit CDF on a w-grid");
    std::string shape;
    int64_t law_i0 = 1;
    double law_a = 1.0, law_scale = 1.0, law_shift = 0.0;
    law->add_option("--shape", shape,
                    "finite-start|growing-start|finite-start-gap|growing-start-gap|gumbel")
        ->required();
    law->add_option("--i0", law_i0, "initial count for finite-start shapes");
    law->add_option("--a", law_a, "decay parameter for gap shapes");
    law->add_option("--scale", law_scale, "time scale (w = t/scale - shift)");
    law->add_option("--shift", law_shift, "time shift");
    law->add_option("--w", w_values, "explicit w values");
    law->add_option("--w-min", w_min, "grid start");
    law->add_option("--w-max", w_max, "grid end");
    law->add_option("--points", w_points, "grid size");

    auto* hitprob = app.add_subcommand("hitprob", "closed-form hitting probabilities");
    std::string kind;
    double hp_beta = 0.5, hp_alpha = 1.0, hp_mu = 1.0, hp_t0 = 1.0;
    int64_t hp_start = 1, hp_barrier = 2, hp_level = 1;
    hitprob->add_option("--kind", kind, "linear-bdp|immig-death|immig-death-timed")->required();
    hitprob->add_option("--beta", hp_beta, "per-head birth rate (death rate 1)");
    hitprob->add_option("--start", hp_start, "starting level");
    hitprob->add_option("--barrier", hp_barrier, "barrier to hit");
    hitprob->add_option("--alpha", hp_alpha, "immigration rate");
    hitprob->add_option("--mu", hp_mu, "per-head death rate");
    hitprob->add_option("--level", hp_level, "start level l; the barrier is 2l");
    hitprob->add_option("--t0", hp_t0, "time bound");

    auto* bench = app.add_subcommand("bench", "wall-clock and agreement of the two engines");
    int64_t bench_n = 100000;
    int bench_reps = 50;
    int bench_samples = 2000;
    bench->add_option("--config", flags.config_path, "config with model.kind = sirs_family")
        ->required();
    bench->add_option("--n", bench_n, "population size")->required();
    bench->add_option("--reps", bench_reps, "timed replications per engine");
    bench->add_option("--samples", bench_samples, "samples per engine for the KS cross-check");
    bench->add_option("--seed", flags.seed, "override the master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(flags);
        if (compare->parsed()) return cmd_compare(flags);
        if (classify->parsed()) {
            spec_args.gap_sign = gap_sign;
            return cmd_classify(flags, spec_args, !gap_coef_opt->empty());
        }
        if (law->parsed()) {
            if (w_values.empty() && w_points > 0) {
                for (int k = 0; k < w_points; ++k)
                    w_values.push_back(w_min +
                                       (w_max - w_min) * k / std::max(1, w_points - 1));
            }
            if (w_values.empty())
                throw std::invalid_argument("law: provide --w or --w-min/--w-max/--points");
            return cmd_law(shape, law_i0, law_a, law_scale, law_shift, w_values);
        }
        if (hitprob->parsed())
            return cmd_hitprob(kind, hp_beta, hp_start, hp_barrier, hp_alpha, hp_mu, hp_level,
                               hp_t0);
        if (bench->parsed()) return cmd_bench(flags, bench_n, bench_reps, bench_samples);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
