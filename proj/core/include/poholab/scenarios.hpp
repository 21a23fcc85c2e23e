#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace poholab::cli {

// ============================================================================
// Scenario configuration and orchestration. The config file is flat
// key = value text with [section] headers; keys are addressed as
// "section.key". The CLI front end maps flags onto the same keys.
// ============================================================================

struct RunConfig {
    std::string scenario;  // green | pohozaev | radial-solve | extract |
                           // construct-radial | construct-two-bubble | sweep
    std::map<std::string, std::string> kv;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
/// Throws ConfigError if scenario-required keys are missing or malformed.
void validate(const RunConfig& config);

struct RunManifest {
    std::map<std::string, std::string> config_echo;
    std::string artifact_version;
    std::map<std::string, double> wall_times_s;
    std::vector<std::string> output_files;
    std::vector<std::string> convention_tags;  // analyst-laplacian, scaled-green
    bool failed = false;
    std::string error;

    std::string to_json() const;
};

/// Exit status: 0 ok, 2 config error, 3 numeric failure. The manifest is
/// written to <out_dir>/manifest.json even on failure.
int run(const RunConfig& config, RunManifest& manifest);

/// Merges sweep CSVs, fits C / ln(1/eps) by least squares and emits a
/// summary table (text + CSV next to it). Returns the table text.
std::string report(const std::vector<std::string>& manifest_paths, const std::string& out_csv);

}  // namespace poholab::cli
