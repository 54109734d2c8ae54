#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "semimed/estimate.hpp"
#include "semimed/simulation.hpp"

namespace semimed {

inline constexpr const char* kVersion = "0.1.0";

// Shortest round-trip decimal representation; byte-stable across runs.
std::string format_double(double v);

// FNV-1a hash of the canonical configuration text, hex-encoded.
std::string config_hash_hex(const std::string& canonical);

struct ManifestInfo {
  std::string command;
  std::string run_id;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double horizon = 0.0;
  bool has_horizon = false;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> config;
};

// Writes manifest.json (includes a timestamp, so it is not byte-stable; the
// CSV outputs are). Returns the manifest path.
std::string write_manifest(const std::string& dir, const ManifestInfo& info);

// curves.csv: long format, one row per (curve, variance method, time).
void write_curves_csv(const EstimateResult& res, const std::string& path,
                      const std::string& run_id);

void write_study_summary_csv(const StudySummary& s, const std::string& path,
                             const std::string& run_id);
void write_oracle_csv(const OracleCurves& truths, const std::string& path,
                      const std::string& run_id);
void write_replicates_csv(const StudySummary& s, const std::string& path,
                          const std::string& run_id);

// Verbatim CSV round-trip support: a parsed table that re-emits byte-identically.
struct CsvTable {
  std::vector<std::string> preamble;  // leading '#' lines
  std::string header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv_table(const std::string& path);
void write_csv_table(const CsvTable& t, const std::string& path);

}  // namespace semimed
