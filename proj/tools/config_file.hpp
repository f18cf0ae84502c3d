#pragma once

#include <map>
#include <string>

#include "sirsim/montecarlo.hpp"

namespace sirsim::cli {

// Flat key-value config with [section] headers, # or ; comment lines.
// Values are looked up as "section.key".
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Keys never read back are usually typos; returns them for warnings.
    std::vector<std::string> unused_keys() const;

  private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> used_;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

struct LoadedExperiment {
    ExperimentConfig config;
    std::string csv_path;
    std::string summary_path;
    std::vector<std::string> warnings;  // e.g. config keys nothing consumed
};

// Builds an experiment from a config file; throws std::invalid_argument with
// the offending field name on any problem.
LoadedExperiment load_experiment(const std::string& path);

}  // namespace sirsim::cli
