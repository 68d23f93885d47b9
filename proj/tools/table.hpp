#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ogsnet/io_util.hpp"

namespace ogscli {

/// Minimal comma-separated table reader for the toolkit's own outputs.
/// No quoting: field values never contain commas.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::vector<std::string>& candidates,
               bool required = true) const {
        for (const std::string& want : candidates)
            for (std::size_t c = 0; c < header.size(); ++c)
                if (header[c] == want) return int(c);
        if (required) {
            std::string names;
            for (const auto& w : candidates) names += w + " ";
            throw std::runtime_error("table is missing a column (wanted one of: " +
                                     names + ")");
        }
        return -1;
    }
};

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

inline Table read_csv(const std::string& path) {
    const std::string content = ogsnet::read_file(path);
    Table t;
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty())
            t.header = split(line, ',');
        else
            t.rows.push_back(split(line, ','));
    }
    if (t.header.empty()) throw std::runtime_error(path + ": empty table");
    return t;
}

inline double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("bad numeric field '" + s + "'");
    return v;
}

/// Row-by-row CSV writer buffering to a string for one atomic write.
class CsvWriter {
public:
    explicit CsvWriter(std::string header) { body_ = std::move(header) + "\n"; }

    CsvWriter& field(const std::string& v) {
        if (!first_) body_ += ',';
        body_ += v;
        first_ = false;
        return *this;
    }
    CsvWriter& field(double v) { return field(ogsnet::fmt_double(v)); }
    CsvWriter& field(std::int64_t v) { return field(std::to_string(v)); }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    void endrow() {
        body_ += '\n';
        first_ = true;
    }
    const std::string& str() const { return body_; }

private:
    std::string body_;
    bool first_ = true;
};

}  // namespace ogscli
