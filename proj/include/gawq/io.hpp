// io.hpp — Deterministic CSV output and JSON run metadata.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gawq/version.hpp"

namespace gawq {

using Json = nlohmann::json;

// Fixed numeric formatting (17 significant digits) so identical runs produce
// byte-identical files.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_number(int v) { return std::to_string(v); }
inline std::string format_number(std::int64_t v) { return std::to_string(v); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::vector<std::string>& add_row() {
        rows.emplace_back();
        return rows.back();
    }
};

// Comma-separated, header row, UTF-8, LF line endings.
inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    auto write_line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    write_line(table.header);
    for (const auto& row : table.rows) write_line(row);
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Every run directory gets one metadata.json naming the producing subcommand,
// the fully resolved configuration, its hash, the seed and the outputs.
inline Json make_metadata(const std::string& subcommand, const Json& resolved_config,
                          std::uint64_t seed, const std::vector<std::string>& outputs,
                          double wall_time_s) {
    Json m;
    m["subcommand"] = subcommand;
    m["config"] = resolved_config;
    m["config_hash"] = hex64(fnv1a64(resolved_config.dump()));
    m["seed"] = seed;
    m["outputs"] = outputs;
    m["version"] = version_string;
    m["wall_time_s"] = wall_time_s;
    return m;
}

inline void write_metadata(const std::filesystem::path& dir, const Json& metadata) {
    std::ofstream out(dir / "metadata.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + (dir / "metadata.json").string());
    out << metadata.dump(2) << '\n';
}

class WallClock {
public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace gawq
