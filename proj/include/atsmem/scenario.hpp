#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atsmem/detection.hpp"
#include "atsmem/geometry.hpp"
#include "atsmem/solver.hpp"

namespace atsmem {

enum class ExperimentKind {
  single_run,
  lifetime_sweep,
  snr_sweep,
  noise_budget,
  beam_splitter,
  efficiency_vs_depth,
  optimize_control,
};

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

enum class ValueType { real, integer, text, flag, real_list };

struct KeySpec {
  std::string section;
  std::string key;
  ValueType type;
  std::string default_value;  // canonical text; empty means no default
  double min = -1e300;
  double max = 1e300;
  bool min_exclusive = false;
  std::vector<std::string> choices;  // text keys only
  std::string help;
};

// Every key a scenario file may contain, in canonical order.
const std::vector<KeySpec>& scenario_schema();

/// A parsed scenario file.
///
/// The format is sectioned key = value text; units are part of the key name
/// (fwhm_ns, temperature_uK, angle_deg). Lines starting with ';' are comments.
/// Lists are comma separated.
class Scenario {
 public:
  using Value = std::variant<double, std::uint64_t, std::string, bool, std::vector<double>>;

  // Throws ConfigError listing every offending key.
  static Scenario parse(std::istream& is, const std::string& source = "<input>");
  static Scenario parse_text(const std::string& text, const std::string& source = "<input>");
  static Scenario load(const std::filesystem::path& path);

  // Canonical text: schema order, explicitly set keys only, shortest
  // round-trip number formatting.
  std::string serialize() const;
  // FNV-1a 64 of the canonical text.
  std::uint64_t hash() const;

  const std::string& name() const;
  ExperimentKind kind() const;

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  double real(const std::string& section, const std::string& key) const;
  std::uint64_t integer(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> real_list(const std::string& section, const std::string& key) const;

  // Parses and range-checks value_text against the schema, then stores it.
  void set(const std::string& section, const std::string& key, const std::string& value_text);

  bool operator==(const Scenario& other) const { return values_ == other.values_; }

 private:
  Value lookup(const std::string& section, const std::string& key) const;

  std::map<std::string, Value> values_;  // "section.key"
  std::vector<std::string> sections_;    // as present in the source
};

// Semantic checks that need more than one key; throws ConfigError with every
// issue found.
void validate_scenario(const Scenario& scenario);

// Builders that turn a scenario into module inputs.
ProtocolSetup build_setup(const Scenario& scenario);
DetectorModel build_detector(const Scenario& scenario);
TrialConfig build_trials(const Scenario& scenario, unsigned threads);
BeamGeometry build_geometry(const Scenario& scenario);

// Bundled scenario directory: $ATSMEM_SCENARIO_DIR, else the source tree copy.
std::filesystem::path scenario_directory();
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace atsmem
