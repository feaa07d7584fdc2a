#pragma once

// Files and workflows around the pipeline.
//
// Config: JSON object with "version": 1 and either a "scenario" block (simulate, roundtrip) or a
// "prefix" block (reconstruct, endpoint, extract), plus an optional "numeric" block. Unknown keys
// are rejected. A prefix may hold only epsilon, the left condition and q on [0, epsilon].
//
// Trace CSV: "# channel=<name>" line, header "t,value", one row per sample, 17 significant digits.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavinv/core_model.hpp"
#include "wavinv/recon.hpp"
#include "wavinv/spectral_extract.hpp"

namespace wavinv {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kManifestSchema = "wavinv.manifest/1";
inline constexpr const char* kReportSchema = "wavinv.report/1";
inline constexpr const char* kSpectralSchema = "wavinv.spectral/1";
inline constexpr const char* kScorecardSchema = "wavinv.scorecard/1";

struct NumericConfig {
  std::size_t modes = 30;           // modes synthesized by simulate
  std::optional<double> dt;         // default: default_time_grid
  std::optional<double> duration;
  std::size_t max_modes = 60;       // extraction cap
  double residual_threshold = 1e-6;
  double min_improvement = 1e-2;
  double gl_margin = 0.9;
  std::size_t gl_nodes = 181;
  double h_tolerance = 0.05;
};

struct RunConfig {
  std::optional<Scenario> scenario;
  std::optional<KnownPrefix> prefix;
  NumericConfig numeric;
};

/// Parse and validate. Errors are ValidationError naming the offending field or the line.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// JSON text of a prefix config equivalent to `prefix` with q given as samples.
std::string prefix_config_json(const KnownPrefix& prefix, const NumericConfig& numeric);

std::string format_trace_csv(const Trace& trace);
/// Throws ValidationError "trace too short" below 16 samples and on malformed rows.
Trace parse_trace_csv(const std::string& text);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes trace.csv and manifest.json into out_dir. Returns the trace.
Trace cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir);

struct ExtractOutput {
  ExtractionResult extraction;
  SpectralData data;
  ResolvabilityReport resolvability;
};
/// Writes spectral.json into out_dir.
ExtractOutput cmd_extract(const RunConfig& config, const std::filesystem::path& trace_path,
                          const std::filesystem::path& out_dir);

/// Writes report.json and q_hat.csv into out_dir.
ReconstructionReport cmd_reconstruct(const RunConfig& config, const std::filesystem::path& trace_path,
                                     const std::filesystem::path& out_dir);

/// Writes far_end.csv (channel UL) into out_dir. Uses eigenvalues and epsilon only.
Trace cmd_endpoint(const RunConfig& config, const std::filesystem::path& trace_path,
                   const std::filesystem::path& out_dir);

struct ScorecardRow {
  std::string metric;
  double value = 0.0;
};
struct Scorecard {
  std::vector<ScorecardRow> rows;
  double value(const std::string& metric) const;
  std::string table() const;
};
/// simulate -> reconstruct -> endpoint in out_dir, then score against the manifest truth.
Scorecard cmd_roundtrip(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace wavinv
