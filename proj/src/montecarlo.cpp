#include "sirsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sirsim {

const char* to_string(EngineKind engine) {
    return engine == EngineKind::ssa ? "ssa" : "tau";
}

namespace {

// ceil that forgives the rounding error of pow (see ScalingSpec).
int64_t ceil_index(double x) {
    const double r = std::round(x);
    if (std::fabs(x - r) < 1e-9 * std::max(1.0, std::fabs(x)))
        return static_cast<int64_t>(r);
    return static_cast<int64_t>(std::ceil(x));
}

}  // namespace

// ------------------------------------------------------------------
// SirsFamily
// ------------------------------------------------------------------

double SirsFamily::lambda_at(int64_t n) const {
    return lambda_limit + lambda_coef * std::pow(static_cast<double>(n), -lambda_exp);
}

double SirsFamily::gamma_at(int64_t n) const {
    return gamma_coef * std::pow(static_cast<double>(n), -gamma_exp);
}

int64_t SirsFamily::i0_at(int64_t n) const {
    return ceil_index(i0_coef * std::pow(static_cast<double>(n), i0_exp));
}

int64_t SirsFamily::r0_at(int64_t n) const {
    if (r0_macroscopic)
        return static_cast<int64_t>(std::llround(r0_coef * static_cast<double>(n)));
    return ceil_index(r0_coef * std::pow(static_cast<double>(n), r0_exp));
}

SirsParams SirsFamily::params_at(int64_t n) const {
    return SirsParams(n, lambda_at(n), gamma_at(n));
}

SirsState SirsFamily::state_at(int64_t n) const { return {i0_at(n), r0_at(n)}; }

ScalingSpec SirsFamily::to_scaling_spec() const {
    ScalingSpec spec;
    // Leading order of 1 - lambda(N): the constant part if there is one,
    // otherwise the power term.
    if (lambda_limit != 1.0) {
        spec.gap_sign = lambda_limit < 1.0 ? 1 : -1;
        spec.gap_coef = std::fabs(1.0 - lambda_limit);
        spec.gap_exp = 0.0;
    } else {
        spec.gap_sign = lambda_coef < 0.0 ? 1 : -1;
        spec.gap_coef = std::fabs(lambda_coef);
        spec.gap_exp = lambda_exp;
    }
    spec.gamma_coef = gamma_coef;
    spec.gamma_exp = gamma_exp;
    spec.i0_coef = i0_coef;
    spec.i0_exp = i0_exp;
    spec.r0_macroscopic = r0_macroscopic;
    spec.r0_coef = r0_coef;
    spec.r0_exp = r0_exp;
    spec.validate();
    return spec;
}

// ------------------------------------------------------------------
// ExperimentConfig
// ------------------------------------------------------------------

void ExperimentConfig::validate() const {
    if (replications < 1)
        throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    if (std::holds_alternative<SirsFamily>(model)) {
        if (n_values.empty())
            throw std::invalid_argument("ExperimentConfig: n_values must not be empty");
        for (size_t k = 0; k + 1 < n_values.size(); ++k)
            if (n_values[k] >= n_values[k + 1])
                throw std::invalid_argument(
                    "ExperimentConfig: n_values must be strictly increasing");
        for (int64_t n : n_values)
            if (n < 1) throw std::invalid_argument("ExperimentConfig: n_values must be >= 1");
    }
    if (event_cap == 0) throw std::invalid_argument("ExperimentConfig: event_cap must be > 0");
    if (workers < 0) throw std::invalid_argument("ExperimentConfig: workers must be >= 0");
    tau.validate();
}

namespace {

uint64_t fnv1a(uint64_t hash, const void* data, size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t k = 0; k < size; ++k) {
        hash ^= bytes[k];
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

uint64_t fnv1a_str(uint64_t hash, const std::string& s) { return fnv1a(hash, s.data(), s.size()); }

std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

uint64_t ExperimentConfig::fingerprint() const {
    // Canonical serialisation of everything that determines the samples.
    std::ostringstream os;
    if (const auto* family = std::get_if<SirsFamily>(&model)) {
        os << "sirs_family;" << full_precision(family->lambda_limit) << ';'
           << full_precision(family->lambda_coef) << ';' << full_precision(family->lambda_exp)
           << ';' << full_precision(family->gamma_coef) << ';'
           << full_precision(family->gamma_exp) << ';' << full_precision(family->i0_coef) << ';'
           << full_precision(family->i0_exp) << ';' << (family->r0_macroscopic ? 1 : 0) << ';'
           << full_precision(family->r0_coef) << ';' << full_precision(family->r0_exp) << ';';
        for (int64_t n : n_values) os << n << ',';
    } else if (const auto* direct = std::get_if<SirsDirect>(&model)) {
        os << "sirs;" << direct->params.n_pop << ';' << full_precision(direct->params.lambda)
           << ';' << full_precision(direct->params.gamma) << ';' << direct->state0.i << ';'
           << direct->state0.r << ';';
    } else {
        const auto& bdp = std::get<BdpDirect>(model);
        os << "bdp;" << full_precision(bdp.params.beta) << ';' << full_precision(bdp.params.mu)
           << ';' << full_precision(bdp.params.alpha) << ';' << (bdp.params.absorb_at_zero ? 1 : 0)
           << ';' << bdp.l0 << ';';
    }
    os << "reps=" << replications << ";engine=" << to_string(engine) << ";seed=" << master_seed
       << ";horizon=" << full_precision(time_horizon) << ";cap=" << event_cap << ";tau="
       << tau.n_c << ',' << full_precision(tau.epsilon) << ',' << tau.ssa_fallback_steps << ','
       << full_precision(tau.ssa_switch_multiple) << ',' << tau.max_halvings;
    return fnv1a_str(0xCBF29CE484222325ULL, os.str());
}

// ------------------------------------------------------------------
// SampleSet
// ------------------------------------------------------------------

bool SampleSet::censored(const Sample& s) const {
    return s.reason == TerminalReason::capped ||
           (std::isfinite(censor_horizon) && s.time >= censor_horizon);
}

std::vector<double> SampleSet::uncensored_times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        if (!censored(s)) out.push_back(s.time);
    return out;
}

int64_t SampleSet::censored_count() const {
    int64_t count = 0;
    for (const auto& s : samples)
        if (censored(s)) ++count;
    return count;
}

// ------------------------------------------------------------------
// run_experiment
// ------------------------------------------------------------------

namespace {

struct ModelInstance {
    ReactionSystem system;
    State state0;
    int64_t n_pop;
};

ModelInstance instantiate(const ModelSpec& model, int64_t n) {
    if (const auto* family = std::get_if<SirsFamily>(&model)) {
        auto params = family->params_at(n);
        auto s0 = family->state_at(n);
        if (s0.i + s0.r > params.n_pop)
            throw std::invalid_argument("SirsFamily: I0 + R0 exceeds N at n = " + std::to_string(n));
        return {sirs_system(params), {s0.i, s0.r}, n};
    }
    if (const auto* direct = std::get_if<SirsDirect>(&model)) {
        return {sirs_system(direct->params), {direct->state0.i, direct->state0.r},
                direct->params.n_pop};
    }
    const auto& bdp = std::get<BdpDirect>(model);
    if (bdp.l0 < 0) throw std::invalid_argument("BdpDirect: l0 must be >= 0");
    return {bdi_system(bdp.params), {bdp.l0}, 0};
}

}  // namespace

std::vector<SampleSet> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    const bool scans_n = std::holds_alternative<SirsFamily>(cfg.model);
    const std::vector<int64_t> sizes = scans_n ? cfg.n_values : std::vector<int64_t>{0};

    const uint64_t fingerprint = cfg.fingerprint();
    const int n_workers = cfg.workers > 0
                              ? cfg.workers
                              : std::max(1u, std::thread::hardware_concurrency());

    std::vector<SampleSet> out;
    out.reserve(sizes.size());

    for (size_t k = 0; k < sizes.size(); ++k) {
        const ModelInstance instance = instantiate(cfg.model, sizes[k]);

        StopCondition stop = StopCondition::component_zero(0)
                                 .with_horizon(cfg.time_horizon)
                                 .with_event_cap(cfg.event_cap);

        std::vector<Sample> samples(static_cast<size_t>(cfg.replications));
        std::atomic<int64_t> next{0};
        std::atomic<bool> failed{false};
        std::string failure;
        std::mutex failure_mutex;

        const auto worker = [&] {
            for (;;) {
                const int64_t j = next.fetch_add(1);
                if (j >= cfg.replications || failed.load()) return;
                try {
                    RngStream rng = RngStream::derive(cfg.master_seed, k, static_cast<uint64_t>(j));
                    SimResult res;
                    if (cfg.engine == EngineKind::ssa)
                        res = simulate_extinction(instance.system, instance.state0, stop, rng);
                    else
                        res = simulate_extinction_tau(instance.system, instance.state0, stop,
                                                      cfg.tau, rng);
                    samples[static_cast<size_t>(j)] = {j, res.time, res.reason};
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    failure = e.what();
                    failed.store(true);
                    return;
                }
            }
        };

        if (n_workers == 1 || cfg.replications == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int spawn = static_cast<int>(
                std::min<int64_t>(n_workers, cfg.replications));
            pool.reserve(static_cast<size_t>(spawn));
            for (int w = 0; w < spawn; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        if (failed.load())
            throw std::runtime_error("run_experiment: replication failed: " + failure);

        std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
            if (a.time != b.time) return a.time < b.time;
            return a.replication < b.replication;
        });

        SampleSet set;
        set.n_pop = instance.n_pop;
        set.samples = std::move(samples);
        set.config_fingerprint = fingerprint;
        set.master_seed = cfg.master_seed;
        set.engine = to_string(cfg.engine);
        set.censor_horizon = cfg.time_horizon;
        out.push_back(std::move(set));
    }
    return out;
}

// ------------------------------------------------------------------
// Empirical statistics
// ------------------------------------------------------------------

double empirical_cdf(const SampleSet& samples, double t) {
    const auto times = samples.uncensored_times();
    if (times.empty())
        throw std::invalid_argument("empirical_cdf: no uncensored samples");
    const auto count = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    return static_cast<double>(count) / static_cast<double>(times.size());
}

double ks_distance(const SampleSet& samples, const AsymptoticLaw& law) {
    const auto times = samples.uncensored_times();
    if (times.size() < 30)
        throw std::invalid_argument("ks_distance: needs at least 30 uncensored samples");
    const double n = static_cast<double>(times.size());
    double ks = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        const double f = law.cdf(times[k]);
        ks = std::max(ks, std::fabs(static_cast<double>(k + 1) / n - f));
        ks = std::max(ks, std::fabs(static_cast<double>(k) / n - f));
    }
    return ks;
}

double ks_two_sample(const SampleSet& a, const SampleSet& b) {
    const auto ta = a.uncensored_times();
    const auto tb = b.uncensored_times();
    if (ta.empty() || tb.empty())
        throw std::invalid_argument("ks_two_sample: needs uncensored samples on both sides");
    double ks = 0.0;
    size_t ia = 0;
    size_t ib = 0;
    const double na = static_cast<double>(ta.size());
    const double nb = static_cast<double>(tb.size());
    while (ia < ta.size() && ib < tb.size()) {
        const double x = std::min(ta[ia], tb[ib]);
        while (ia < ta.size() && ta[ia] <= x) ++ia;
        while (ib < tb.size() && tb[ib] <= x) ++ib;
        ks = std::max(ks, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return ks;
}

namespace {

double quantile_of(const std::vector<double>& sorted, double p) {
    const size_t n = sorted.size();
    const size_t idx = std::min(
        n - 1, static_cast<size_t>(std::max(0.0, std::ceil(p * static_cast<double>(n)) - 1.0)));
    return sorted[idx];
}

}  // namespace

NReport build_report(const SampleSet& samples, const AsymptoticLaw& law) {
    NReport report = build_report(samples);
    report.ks = ks_distance(samples, law);
    return report;
}

NReport build_report(const SampleSet& samples) {
    NReport report;
    report.n_pop = samples.n_pop;
    report.censored = samples.censored_count();

    const auto times = samples.uncensored_times();
    report.sample_count = static_cast<int64_t>(times.size());
    if (times.size() < 30)
        throw std::invalid_argument("build_report: needs at least 30 uncensored samples");

    report.quantiles.reserve(99);
    for (int p = 1; p <= 99; ++p)
        report.quantiles.push_back(quantile_of(times, static_cast<double>(p) / 100.0));

    // 40 equal-width bins over the [0.5%, 99.5%] quantile range. Masses are
    // fractions of all uncensored samples, so they sum to <= 1.
    const double lo = quantile_of(times, 0.005);
    double hi = quantile_of(times, 0.995);
    if (hi <= lo) hi = lo + 1.0;
    constexpr int kBins = 40;
    const double width = (hi - lo) / kBins;
    auto& hist = report.histogram;
    hist.edges.resize(kBins + 1);
    for (int b = 0; b <= kBins; ++b) hist.edges[static_cast<size_t>(b)] = lo + width * b;
    hist.density.assign(kBins, 0.0);
    const double total = static_cast<double>(times.size());
    for (double t : times) {
        if (t < lo || t > hi) continue;
        int b = static_cast<int>((t - lo) / width);
        b = std::clamp(b, 0, kBins - 1);
        hist.density[static_cast<size_t>(b)] += 1.0 / total;
    }
    hist.cumulative.resize(kBins);
    for (int b = 0; b < kBins; ++b) {
        const auto count =
            std::upper_bound(times.begin(), times.end(), hist.edges[static_cast<size_t>(b) + 1]) -
            times.begin();
        hist.cumulative[static_cast<size_t>(b)] = static_cast<double>(count) / total;
    }
    return report;
}

// ------------------------------------------------------------------
// Persistence
// ------------------------------------------------------------------

namespace {

std::string hex64(uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

TerminalReason reason_from_string(const std::string& s) {
    if (s == "stopped") return TerminalReason::stopped;
    if (s == "absorbed") return TerminalReason::absorbed;
    if (s == "capped") return TerminalReason::capped;
    throw std::runtime_error("unknown terminal reason in CSV: " + s);
}

}  // namespace

void write_results(const std::vector<SampleSet>& sets, const ComparisonReport& report,
                   const std::string& csv_path, const std::string& summary_path) {
    // Replay warning: an existing summary with a different fingerprint means
    // the caller is overwriting results from another configuration.
    std::vector<std::string> warnings = report.warnings;
    {
        std::ifstream existing(summary_path);
        if (existing.good()) {
            try {
                nlohmann::json old = nlohmann::json::parse(existing);
                const std::string old_fp = old.value("config_fingerprint", "");
                if (!old_fp.empty() && old_fp != hex64(report.config_fingerprint))
                    warnings.push_back("config fingerprint mismatch on replay: existing " +
                                       old_fp + ", new " + hex64(report.config_fingerprint));
            } catch (const nlohmann::json::exception&) {
                warnings.push_back("existing summary at " + summary_path + " is not valid JSON");
            }
        }
    }

    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("write_results: cannot open " + csv_path);
    csv << "replication_index,n_pop,extinction_time,terminal_reason,engine\n";
    for (const auto& set : sets) {
        for (const auto& s : set.samples) {
            csv << s.replication << ',' << set.n_pop << ',' << full_precision(s.time) << ','
                << to_string(s.reason) << ',' << set.engine << '\n';
        }
    }
    if (!csv.flush()) throw std::runtime_error("write_results: write failed for " + csv_path);

    nlohmann::json summary;
    summary["config_fingerprint"] = hex64(report.config_fingerprint);
    summary["seed"] = report.master_seed;
    if (!sets.empty()) {
        summary["engine"] = sets.front().engine;
        // JSON has no infinity; omit the horizon when there is none.
        if (std::isfinite(sets.front().censor_horizon))
            summary["censor_horizon"] = sets.front().censor_horizon;
    }
    summary["warnings"] = warnings;
    summary["per_n"] = nlohmann::json::array();
    for (const auto& entry : report.per_n) {
        nlohmann::json j;
        j["n"] = entry.n_pop;
        if (std::isfinite(entry.ks)) j["ks"] = entry.ks;
        j["samples"] = entry.sample_count;
        j["censored"] = entry.censored;
        j["quantiles"] = entry.quantiles;
        j["histogram_density"] = {{"edges", entry.histogram.edges},
                                  {"masses", entry.histogram.density}};
        j["histogram_cdf"] = {{"edges", entry.histogram.edges},
                              {"values", entry.histogram.cumulative}};
        summary["per_n"].push_back(std::move(j));
    }

    std::ofstream js(summary_path);
    if (!js) throw std::runtime_error("write_results: cannot open " + summary_path);
    js << summary.dump(2) << '\n';
    if (!js.flush()) throw std::runtime_error("write_results: write failed for " + summary_path);
}

std::vector<SampleSet> load_results(const std::string& csv_path,
                                    const std::string& summary_path) {
    std::ifstream js(summary_path);
    if (!js) throw std::runtime_error("load_results: cannot open " + summary_path);
    nlohmann::json summary = nlohmann::json::parse(js);
    const uint64_t fingerprint =
        std::stoull(summary.at("config_fingerprint").get<std::string>(), nullptr, 16);
    const uint64_t seed = summary.at("seed").get<uint64_t>();
    double horizon = std::numeric_limits<double>::infinity();
    if (summary.contains("censor_horizon") && summary["censor_horizon"].is_number())
        horizon = summary["censor_horizon"].get<double>();

    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("load_results: cannot open " + csv_path);
    std::string line;
    if (!std::getline(csv, line))
        throw std::runtime_error("load_results: empty CSV at " + csv_path);
    if (line != "replication_index,n_pop,extinction_time,terminal_reason,engine")
        throw std::runtime_error("load_results: unexpected CSV header in " + csv_path);

    std::vector<SampleSet> out;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        Sample sample;
        int64_t n_pop;
        std::getline(row, field, ',');
        sample.replication = std::stoll(field);
        std::getline(row, field, ',');
        n_pop = std::stoll(field);
        std::getline(row, field, ',');
        sample.time = std::stod(field);
        std::getline(row, field, ',');
        sample.reason = reason_from_string(field);
        std::string engine;
        std::getline(row, engine, ',');

        if (out.empty() || out.back().n_pop != n_pop) {
            SampleSet set;
            set.n_pop = n_pop;
            set.config_fingerprint = fingerprint;
            set.master_seed = seed;
            set.engine = engine;
            set.censor_horizon = horizon;
            out.push_back(std::move(set));
        }
        out.back().samples.push_back(sample);
    }
    return out;
}

}  // namespace sirsim
