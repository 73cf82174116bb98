#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kdv/harness/runs.hpp"

namespace kdv::harness {

namespace fs = std::filesystem;

/// Writes to a sibling temporary and renames, so readers never see a
/// half-written file.
void write_atomic(const fs::path& path, const std::string& content);

/// Snapshot CSV: header "S,N,L,origin,V0,...", one row per snapshot.
std::string snapshots_csv(std::span<const FieldState> snapshots);
/// Parses a snapshot CSV; throws ValidationError on anything malformed.
std::vector<FieldState> parse_snapshots_csv(const std::string& text);
std::vector<FieldState> read_snapshots_csv(const fs::path& path);

std::string fits_csv(std::span<const FitRow> rows);
std::string diagnostics_csv(std::span<const diag::DiagnosticsRecord> rows);
std::string ode_csv(const ode::ODETrajectory& traj);
std::string ode_json(const ode::ODETrajectory& traj, const RunConfig& cfg);
std::string overlay_csv(std::span<const CompareRow> rows);
std::string summary_json(const CompareSummary& s);
std::string convergence_json(const ConvergenceReport& rep);
std::string spectrum_json(const SpectrumReport& rep);
std::string spectrum_table(const SpectrumReport& rep);

/// manifest.json: command, config hash, every config value, file list.
std::string manifest_json(const std::string& command, const RunConfig& cfg, std::span<const std::string> files);

std::string diagnostics_header();

}  // namespace kdv::harness
