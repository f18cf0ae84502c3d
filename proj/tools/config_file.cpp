#include "config_file.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sirsim::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) != 0; }

void ConfigFile::fail(const std::string& key, const std::string& what) const {
    throw std::invalid_argument("config " + origin_ + ": field '" + key + "' " + what);
}

std::string ConfigFile::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(key, "is required");
    used_[key] = true;
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) fail(key, "is not a number: '" + raw + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(key, "is not a number: '" + raw + "'");
    } catch (const std::out_of_range&) {
        fail(key, "is out of range: '" + raw + "'");
    }
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int64_t ConfigFile::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        size_t pos = 0;
        const int64_t v = std::stoll(raw, &pos);
        if (pos != raw.size()) fail(key, "is not an integer: '" + raw + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(key, "is not an integer: '" + raw + "'");
    } catch (const std::out_of_range&) {
        fail(key, "is out of range: '" + raw + "'");
    }
}

int64_t ConfigFile::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = get_string(key);
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    fail(key, "is not a boolean: '" + raw + "'");
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (!used_.count(key)) out.push_back(key);
    return out;
}

LoadedExperiment load_experiment(const std::string& path) {
    const ConfigFile cfg = ConfigFile::parse_file(path);
    LoadedExperiment out;

    const std::string kind = cfg.get_string("model.kind");
    if (kind == "sirs_family") {
        SirsFamily family;
        family.lambda_limit = cfg.get_double("model.lambda_limit", 1.0);
        family.lambda_coef = cfg.get_double("model.lambda_coef", 0.0);
        family.lambda_exp = cfg.get_double("model.lambda_exp", 0.0);
        family.gamma_coef = cfg.get_double("model.gamma_coef");
        family.gamma_exp = cfg.get_double("model.gamma_exp");
        family.i0_coef = cfg.get_double("model.i0_coef");
        family.i0_exp = cfg.get_double("model.i0_exp", 0.0);
        const std::string r0_kind = cfg.get_string("model.r0_kind", "power");
        if (r0_kind == "fraction") {
            family.r0_macroscopic = true;
            family.r0_coef = cfg.get_double("model.r0_coef");
        } else if (r0_kind == "power") {
            family.r0_coef = cfg.get_double("model.r0_coef");
            family.r0_exp = cfg.get_double("model.r0_exp", 0.0);
        } else {
            throw std::invalid_argument("config " + path +
                                        ": field 'model.r0_kind' must be power or fraction");
        }
        out.config.model = family;

        const std::string raw = cfg.get_string("experiment.n_values");
        std::istringstream list(raw);
        std::string item;
        while (std::getline(list, item, ',')) {
            try {
                out.config.n_values.push_back(std::stoll(item));
            } catch (const std::exception&) {
                throw std::invalid_argument("config " + path +
                                            ": field 'experiment.n_values' has a bad entry '" +
                                            item + "'");
            }
        }
    } else if (kind == "sirs") {
        const SirsParams params(cfg.get_int("model.n_pop"), cfg.get_double("model.lambda"),
                                cfg.get_double("model.gamma"));
        const SirsState state0{cfg.get_int("model.i0"), cfg.get_int("model.r0")};
        out.config.model = SirsDirect{params, state0};
    } else if (kind == "bdp") {
        const BdiParams params(cfg.get_double("model.beta"), cfg.get_double("model.mu"),
                               cfg.get_double("model.alpha", 0.0),
                               cfg.get_bool("model.absorb_at_zero", false));
        out.config.model = BdpDirect{params, cfg.get_int("model.l0")};
    } else {
        throw std::invalid_argument("config " + path +
                                    ": field 'model.kind' must be sirs_family, sirs or bdp");
    }

    out.config.replications = cfg.get_int("experiment.replications", 700);
    const std::string engine = cfg.get_string("experiment.engine", "ssa");
    if (engine == "ssa")
        out.config.engine = EngineKind::ssa;
    else if (engine == "tau")
        out.config.engine = EngineKind::tau;
    else
        throw std::invalid_argument("config " + path +
                                    ": field 'experiment.engine' must be ssa or tau");
    out.config.master_seed = static_cast<uint64_t>(cfg.get_int("experiment.master_seed", 1));
    out.config.event_cap = static_cast<uint64_t>(
        cfg.get_int("experiment.event_cap", 1'000'000'000));
    out.config.workers = static_cast<int>(cfg.get_int("experiment.workers", 0));
    if (cfg.has("experiment.time_horizon"))
        out.config.time_horizon = cfg.get_double("experiment.time_horizon");

    out.config.tau.n_c = cfg.get_int("tau.n_c", 200);
    out.config.tau.epsilon = cfg.get_double("tau.epsilon", 0.02);
    out.config.tau.ssa_fallback_steps = cfg.get_int("tau.ssa_fallback_steps", 100);
    out.config.tau.ssa_switch_multiple = cfg.get_double("tau.ssa_switch_multiple", 10.0);
    out.config.tau.max_halvings = static_cast<int>(cfg.get_int("tau.max_halvings", 60));

    out.csv_path = cfg.get_string("output.csv", "samples.csv");
    out.summary_path = cfg.get_string("output.summary", "summary.json");

    out.config.validate();
    for (const auto& key : cfg.unused_keys())
        out.warnings.push_back("unused config key '" + key + "' in " + path);
    return out;
}

}  // namespace sirsim::cli
