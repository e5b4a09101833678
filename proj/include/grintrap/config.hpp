#ifndef GRINTRAP_CONFIG_HPP
#define GRINTRAP_CONFIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grintrap/sweep.hpp"

namespace grintrap {

// Config-file error with its location; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& file, int line, int col, const std::string& msg);
    std::string file;
    int line;
    int col;
};

// Strict section/key-value document: '[section]' headers, 'key = value' lines,
// '#' comments. Every key records its location; consumers mark keys as used
// and unknown leftovers are rejected with their line and column.
class ConfigDoc {
  public:
    static ConfigDoc parse_file(const std::string& path);
    static ConfigDoc parse_string(const std::string& text, const std::string& name);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string require_string(const std::string& section, const std::string& key);
    double require_double(const std::string& section, const std::string& key);
    double get_double(const std::string& section, const std::string& key, double fallback);
    long get_long(const std::string& section, const std::string& key, long fallback);
    bool get_bool(const std::string& section, const std::string& key, bool fallback);
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    std::vector<double> require_double_list(const std::string& section, const std::string& key);

    // Raises a located error for a semantic problem with a consumed key.
    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& msg) const;

    // Rejects any key that no consumer claimed.
    void check_all_consumed() const;

    const std::string& name() const { return name_; }

  private:
    struct Entry {
        std::string raw;
        int line = 0;
        int col = 0;
        bool consumed = false;
    };
    struct Section {
        int line = 0;
        std::map<std::string, Entry> entries;
    };
    Entry* find(const std::string& section, const std::string& key);
    const Entry* find(const std::string& section, const std::string& key) const;
    double parse_double(const std::string& section, const std::string& key, const Entry& e) const;

    std::map<std::string, Section> sections_;
    std::vector<std::string> section_order_;
    std::string name_;
};

struct SweepBlock {
    std::string parameter;
    std::vector<double> values;
    double pin_peak = 0.0;
    int threads = 0;
};

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    std::vector<double> points() const;
};

struct PhaseBlock {
    bool energy_grid = false;
    GridAxis r{0.05, 5.0, 120};
    GridAxis r_dot{-0.8, 0.8, 81};
};

struct StabilityBlock {
    GridAxis r0;
    GridAxis kappa0;
    GridAxis beta;
};

// Fully resolved run configuration: every default filled in, every value
// checked. Reports embed it, and re-running from the embedded copy reproduces
// the run.
struct RunConfig {
    ProfileSpec profile;
    LaunchSpec launch;
    RunOptions options;
    std::string output_dir;  // empty: resolved by the CLI (flag, env, cwd)
    long decimation = 1;
    std::optional<SweepBlock> sweep;
    std::optional<PhaseBlock> phase;
    std::optional<StabilityBlock> stability;
};

// Loads and resolves a config file. Also accepts a previously written orbit
// report, whose embedded 'config.*' lines are read back as the config.
RunConfig load_run_config(const std::string& path);

// Deterministic serialization of the resolved config (17 significant digits);
// parsing it back yields an identical RunConfig.
std::string serialize_config(const RunConfig& config);

// Profile bounds check shared by the commands: throws ConfigError when the
// profile leaves its admissible index range.
void require_valid_profile(const ConfigDoc& doc, const ProfileSpec& spec);

}  // namespace grintrap

#endif  // GRINTRAP_CONFIG_HPP
