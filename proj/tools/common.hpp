#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace CLI {
class App;
}

namespace ogscli {

constexpr const char* kVersion = "0.1.0";

// Exit codes, one per failure class (documented in the README).
constexpr int kExitFailure = 1;       // unexpected internal error
constexpr int kExitUsage = 2;         // unknown flag / bad command line
constexpr int kExitMissingInput = 3;  // referenced input file absent
constexpr int kExitValidation = 4;    // malformed content or bad parameters

struct missing_input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-run bookkeeping: everything the reproducibility manifest records.
struct RunContext {
    std::vector<std::string> command_line;
    std::string subcommand;
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, role
    nlohmann::json metadata = nlohmann::json::object();
    std::string primary_out;
    std::uint64_t seed = 0;
    bool seed_used = false;
    int workers = 0;

    /// Registers an input path, failing with the missing-input exit class if
    /// it does not exist.
    std::string require_input(const std::string& path);
    void note_output(const std::string& path, const std::string& role);
    /// Writes <primary_out>.manifest.json (atomic).
    void write_manifest() const;
};

std::string fmt_int(std::int64_t v);

/// "a:b:step" (or a single number) -> inclusive sweep values.
std::vector<double> parse_sweep(const std::string& text);

/// Sample-count flags accept scientific notation ("1e8").
std::int64_t parse_count(double value, const char* what);

void register_data_commands(CLI::App& app, RunContext& ctx);
void register_model_commands(CLI::App& app, RunContext& ctx);
void register_orbit_commands(CLI::App& app, RunContext& ctx);

}  // namespace ogscli
