#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "degenera/config.hpp"

namespace degenera {

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    Config config;

    /// Validate the parsed file and apply CLI overrides (empty = keep config).
    static RunConfig from_config(Config cfg, const std::string& out_override = "",
                                 const std::string& seed_override = "");
};

/// Exit status contract: 0 all checks pass, 2 a checked hypothesis or conclusion
/// failed (expected-negative runs), 1 execution error.
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> outcomes;
    std::string verdict;
    int exit_code = 1;
    double wall_ms = 0.0; // in-memory only; never serialized (reports are byte-stable)
};

RunReport run(const RunConfig& rc);

/// 17-significant-digit floating point formatting used by every artifact.
std::string format_g17(double v);

/// Atomic write: temp file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_text() const; // fixed column order, LF endings
};

} // namespace degenera
