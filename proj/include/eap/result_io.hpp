#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "eap/dataset.hpp"
#include "eap/engine.hpp"
#include "eap/metrics.hpp"
#include "eap/solution.hpp"

namespace eap {

/// Everything about a run that belongs in the result file besides the
/// solution itself.
struct RunMeta {
  std::string algorithm;       // ap | eap | eap-nocn
  std::string dataset_source;  // "csv:<path>" | "synthetic:<scenario>"
  std::string preference;      // "per-time-min" | "global-min" | "const:<x>"
  EapConfig config;
  std::string timestamp;  // excluded from the determinism hash
};

nlohmann::json solution_to_json(const ClusteringSolution& sol,
                                const SolutionMetrics& metrics,
                                const RunMeta& meta);

/// Schema check for result files; returns human-readable problems (empty =
/// valid). Verifies required fields, that every assignment references an
/// existing track with a matching exemplar label, and that each track's
/// appearances form one contiguous interval.
std::vector<std::string> validate_solution_json(const nlohmann::json& j);

/// FNV-1a over the canonical dump with the volatile fields (timestamp, the
/// hash itself) removed. Same config + seed => same hash.
std::uint64_t determinism_hash(const nlohmann::json& j);

void write_json(const nlohmann::json& j, const std::string& path);
void write_assignments_csv(const ClusteringSolution& sol,
                           const std::string& path);
void write_metrics_csv(const SolutionMetrics& m, const std::string& path);
/// Long-format (t, algorithm, rand) rows appended for one algorithm.
void append_plot_rows(const SolutionMetrics& m, const std::string& algorithm,
                      std::string* out);

}  // namespace eap
