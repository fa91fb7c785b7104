#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "brane/evolve2.hpp"
#include "brane/field.hpp"
#include "brane/residuals.hpp"

namespace brane {

/// Everything one experiment needs, as loaded from the JSON config.
struct ExperimentConfig {
    int m = 1;
    std::vector<double> length;
    std::vector<std::size_t> n;
    InitialSpec initial;
    SolverConfig solver;

    Grid grid() const;
    FieldState initial_state() const;
};

/// Parses and validates a config document. Malformed JSON and wrongly typed
/// values raise FormatError; unknown keys and out-of-range values raise
/// ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Shortest decimal that parses back to the same binary64. Always carries a
/// '.' or exponent so that integral values (and -0) stay floating point.
std::string format_double(double v);

std::string snapshot_to_json(const FieldState& s);
/// FormatError names the offending field and its line.
FieldState snapshot_from_json(const std::string& text);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

void write_snapshot(const FieldState& s, const std::filesystem::path& path);
FieldState read_snapshot(const std::filesystem::path& path);

std::vector<std::string> diagnostics_header(int m);
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows, int m);
void write_diagnostics(const std::vector<DiagnosticsRow>& rows, int m, const std::filesystem::path& path);

}  // namespace brane
