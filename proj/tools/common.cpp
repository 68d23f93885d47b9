#include "common.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ogsnet/io_util.hpp"

namespace ogscli {

std::string RunContext::require_input(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw missing_input_error("input file not found: " + path);
    inputs.push_back(path);
    return path;
}

void RunContext::note_output(const std::string& path, const std::string& role) {
    outputs.emplace_back(path, role);
    if (primary_out.empty()) primary_out = path;
}

void RunContext::write_manifest() const {
    if (primary_out.empty()) return;
    nlohmann::json m;
    m["tool"] = "ogsnet";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["command_line"] = command_line;
    m["inputs"] = inputs;
    auto outs = nlohmann::json::array();
    for (const auto& [path, role] : outputs)
        outs.push_back({{"path", path}, {"role", role}});
    m["outputs"] = outs;
    if (seed_used) m["seed"] = seed;
    m["workers"] = workers;
    if (!metadata.empty()) m["metadata"] = metadata;

    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&tt, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    m["created_utc"] = stamp;

    ogsnet::atomic_write_file(primary_out + ".manifest.json", m.dump(2) + "\n");
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<double> out;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        out.push_back(std::stod(text));
        return out;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("sweep must be start:stop:step, got '" + text + "'");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("sweep step must be > 0");
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    if (out.empty()) throw std::invalid_argument("sweep '" + text + "' is empty");
    return out;
}

std::int64_t parse_count(double value, const char* what) {
    if (!(value >= 1.0) || value > 9.2e18 || std::fabs(value - std::round(value)) > 0.5)
        throw std::invalid_argument(std::string(what) + " must be a positive integer");
    return std::int64_t(std::llround(value));
}

}  // namespace ogscli
