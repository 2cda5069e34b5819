#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atsmem/detection.hpp"
#include "atsmem/scenario.hpp"

namespace atsmem {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides trials.seed
  unsigned threads = 1;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Metric {
  std::string key;
  double value = 0.0;
  double stderr_value = 0.0;
};

struct RunReport {
  std::string scenario_name;
  ExperimentKind kind = ExperimentKind::single_run;
  std::string scenario_text;  // canonical echo
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version = kVersion;

  // tables.front() is the per-point results table.
  std::vector<Table> tables;
  std::vector<Metric> metrics;
  std::map<std::string, DetectionHistogram> histograms;

  double wall_seconds = 0.0;
  int simulations = 0;
  long solver_steps = 0;
  long skipped_steps = 0;
  std::vector<std::string> notes;

  const Metric* find_metric(const std::string& key) const;
  double metric(const std::string& key) const;  // throws if absent
};

// Stream for sub-experiment k of a seeded run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});
RunReport run_scenario(const std::filesystem::path& path, const RunOptions& options = {});

// Writes results.csv, one CSV per extra table, metrics.csv, histograms/*.csv,
// scenario.ini and summary.txt into dir. Only summary.txt carries run-dependent
// text (wall clock).
void write_report(const RunReport& report, const std::filesystem::path& dir);

// --out, then $ATSMEM_OUT_DIR, then ./atsmem-out.
std::filesystem::path default_output_directory();

}  // namespace atsmem
