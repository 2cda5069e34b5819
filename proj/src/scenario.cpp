#include "atsmem/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "atsmem/errors.hpp"

namespace atsmem {

namespace {

constexpr double kInf = 1e300;

KeySpec real_key(std::string section, std::string key, std::string def, double lo, double hi,
                 bool lo_open, std::string help) {
  return {std::move(section), std::move(key), ValueType::real, std::move(def), lo, hi, lo_open, {},
          std::move(help)};
}

KeySpec int_key(std::string section, std::string key, std::string def, double lo, std::string help) {
  return {std::move(section), std::move(key), ValueType::integer, std::move(def), lo, kInf, false, {},
          std::move(help)};
}

KeySpec text_key(std::string section, std::string key, std::string def, std::vector<std::string> choices,
                 std::string help) {
  return {std::move(section), std::move(key), ValueType::text, std::move(def), -kInf, kInf, false,
          std::move(choices), std::move(help)};
}

KeySpec flag_key(std::string section, std::string key, std::string def, std::string help) {
  return {std::move(section), std::move(key), ValueType::flag, std::move(def), -kInf, kInf, false, {},
          std::move(help)};
}

KeySpec list_key(std::string section, std::string key, std::string def, double lo, double hi, bool lo_open,
                 std::string help) {
  return {std::move(section), std::move(key), ValueType::real_list, std::move(def), lo, hi, lo_open, {},
          std::move(help)};
}

std::vector<KeySpec> make_schema() {
  return {
      text_key("scenario", "name", "", {}, "scenario identifier"),
      text_key("scenario", "kind", "",
               {"single_run", "lifetime_sweep", "snr_sweep", "noise_budget", "beam_splitter",
                "efficiency_vs_depth", "optimize_control"},
               "experiment kind"),
      text_key("scenario", "description", "", {}, "free text"),

      text_key("species", "name", "rb87", {"rb87"}, "atomic species"),
      real_key("species", "decay_rate_MHz", "3.03", 0, kInf, true, "optical coherence decay rate / 2pi"),

      real_key("ensemble", "optical_depth", "10", 0, kInf, true, "resonant optical depth d"),
      real_key("ensemble", "temperature_uK", "50", 0, kInf, false, "cloud temperature"),
      real_key("ensemble", "length_mm", "2", 0, kInf, true, "medium length"),
      real_key("ensemble", "magnetic_lifetime_ns", "0", 0, kInf, false, "efficiency 1/e time, 0 disables"),
      real_key("ensemble", "overlap_efficiency", "1", 0, 1, true, "probe/control mode overlap"),

      real_key("geometry", "angle_deg", "0", 0, 180, false, "probe-control separation angle"),
      text_key("geometry", "wavenumber", "approximate", {"approximate", "exact"}, "phase-matching model"),
      flag_key("geometry", "motional_dephasing", "true", "apply grating washout during storage"),

      text_key("pulse", "shape", "gaussian", {"gaussian", "square"}, "envelope of probe and control"),
      real_key("pulse", "probe_duration_ns", "30", 0, kInf, true, "quoted probe duration"),
      real_key("pulse", "control_duration_ns", "", 0, kInf, true, "quoted control duration, default probe"),
      text_key("pulse", "fwhm_convention", "intensity", {"intensity", "amplitude"},
               "profile the quoted durations refer to"),
      real_key("pulse", "storage_ns", "200", 0, kInf, true, "write to first readout delay"),

      real_key("schedule", "write_area_pi", "2", 0, 2, true, "write pulse area in units of pi"),
      list_key("schedule", "readout_areas_pi", "2", 0, 2, true, "readout areas in units of pi"),
      real_key("schedule", "readout_spacing_ns", "150", 0, kInf, true, "delay between readouts"),

      int_key("solver", "n_z", "128", 32, "cells along the medium"),
      real_key("solver", "dt_ns", "0.05", 0, kInf, true, "time step"),
      flag_key("solver", "lossless", "false", "drop spontaneous loss"),
      flag_key("solver", "hold_shortcut", "true", "skip quiet storage steps"),

      text_key("detector", "model", "calibrated", {"calibrated", "custom"}, "starting point of the noise model"),
      real_key("detector", "eta_t", "0.1", 0, 1, true, "transmission after the memory"),
      real_key("detector", "dark_rate_per_s", "", 0, kInf, false, "dark and ambient counts"),
      real_key("detector", "leakage_write", "", 0, kInf, false, "write leakage counts per trial"),
      real_key("detector", "leakage_read", "", 0, kInf, false, "read leakage counts per trial"),
      real_key("detector", "atom_leakage_write", "", 0, kInf, false, "extra write leakage with atoms"),
      real_key("detector", "atom_leakage_read", "", 0, kInf, false, "extra read leakage with atoms"),
      real_key("detector", "leakage_offset_ns", "", -kInf, kInf, false, "leakage peak shift"),
      real_key("detector", "leakage_fwhm_ns", "", 0, kInf, true, "leakage peak width"),

      int_key("trials", "n_trials", "100000", 1, "storage-and-recall attempts"),
      real_key("trials", "mean_photons", "1", 0, kInf, false, "mean input photon number"),
      real_key("trials", "bin_width_ns", "1", 0, kInf, true, "histogram bin"),
      real_key("trials", "window_ns", "50", 0, kInf, true, "analysis window"),
      int_key("trials", "seed", "1", 0, "base seed"),
      real_key("trials", "recall_efficiency", "", 0, 1, true, "in-window efficiency override"),

      list_key("sweep", "storage_ns", "", 0, kInf, true, "lifetime_sweep points"),
      list_key("sweep", "mean_photons", "", 0, kInf, true, "snr_sweep points"),
      list_key("sweep", "optical_depth", "", 0, kInf, true, "efficiency_vs_depth points"),
      real_key("sweep", "rabi_min_MHz", "", 0, kInf, true, "optimize_control lower bound, Omega/2pi"),
      real_key("sweep", "rabi_max_MHz", "", 0, kInf, true, "optimize_control upper bound, Omega/2pi"),

      flag_key("split", "tune", "false", "bisection-tune a two-way split"),
      real_key("split", "target_ratio", "0.5", 0, 1, true, "first-bin share for tuning"),
  };
}

const KeySpec* find_spec(const std::string& section, const std::string& key) {
  for (const auto& s : scenario_schema())
    if (s.section == section && s.key == key) return &s;
  return nullptr;
}

bool known_section(const std::string& section) {
  for (const auto& s : scenario_schema())
    if (s.section == section) return true;
  return false;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool parse_real(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::string range_text(const KeySpec& spec) {
  std::string lo = spec.min <= -kInf ? "" : (spec.min_exclusive ? "> " : ">= ") + format_real(spec.min);
  std::string hi = spec.max >= kInf ? "" : "<= " + format_real(spec.max);
  if (!lo.empty() && !hi.empty()) return lo + " and " + hi;
  return lo + hi;
}

bool in_range(const KeySpec& spec, double v) {
  if (spec.min_exclusive ? !(v > spec.min) : !(v >= spec.min)) return false;
  return v <= spec.max;
}

// Returns an error message, or empty on success.
std::string convert(const KeySpec& spec, const std::string& raw, Scenario::Value& out) {
  const std::string id = spec.section + "." + spec.key;
  const std::string text = trim(raw);
  switch (spec.type) {
    case ValueType::real: {
      double v;
      if (!parse_real(text, v)) return id + ": '" + text + "' is not a finite number";
      if (!in_range(spec, v)) return id + ": " + text + " must be " + range_text(spec);
      out = v;
      return {};
    }
    case ValueType::integer: {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        return id + ": '" + text + "' is not a non-negative integer";
      if (static_cast<double>(v) < spec.min) return id + ": " + text + " must be " + range_text(spec);
      out = v;
      return {};
    }
    case ValueType::text: {
      if (text.empty()) return id + ": empty value";
      if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), text) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
        return id + ": '" + text + "' is not one of {" + all + "}";
      }
      out = text;
      return {};
    }
    case ValueType::flag: {
      if (text == "true" || text == "yes" || text == "1") out = true;
      else if (text == "false" || text == "no" || text == "0") out = false;
      else return id + ": '" + text + "' is not a boolean";
      return {};
    }
    case ValueType::real_list: {
      std::vector<double> values;
      if (text.empty()) return id + ": empty list";
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_real(item, v)) return id + ": list item '" + trim(item) + "' is not a finite number";
        if (!in_range(spec, v)) return id + ": list item " + trim(item) + " must be " + range_text(spec);
        values.push_back(v);
      }
      out = std::move(values);
      return {};
    }
  }
  return id + ": unsupported type";
}

std::string value_text(const Scenario::Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          std::string s;
          for (double d : x) s += (s.empty() ? "" : ", ") + format_real(d);
          return s;
        }
      },
      v);
}

std::string full_key(const std::string& section, const std::string& key) { return section + "." + key; }

}  // namespace

const std::vector<KeySpec>& scenario_schema() {
  static const std::vector<KeySpec> schema = make_schema();
  return schema;
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  static const std::pair<std::string_view, ExperimentKind> table[] = {
      {"single_run", ExperimentKind::single_run},
      {"lifetime_sweep", ExperimentKind::lifetime_sweep},
      {"snr_sweep", ExperimentKind::snr_sweep},
      {"noise_budget", ExperimentKind::noise_budget},
      {"beam_splitter", ExperimentKind::beam_splitter},
      {"efficiency_vs_depth", ExperimentKind::efficiency_vs_depth},
      {"optimize_control", ExperimentKind::optimize_control},
  };
  for (const auto& [n, k] : table)
    if (n == name) return k;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::single_run: return "single_run";
    case ExperimentKind::lifetime_sweep: return "lifetime_sweep";
    case ExperimentKind::snr_sweep: return "snr_sweep";
    case ExperimentKind::noise_budget: return "noise_budget";
    case ExperimentKind::beam_splitter: return "beam_splitter";
    case ExperimentKind::efficiency_vs_depth: return "efficiency_vs_depth";
    case ExperimentKind::optimize_control: return "optimize_control";
  }
  return "?";
}

Scenario Scenario::parse(std::istream& is, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  Scenario sc;
  std::vector<std::string> issues;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      issues.push_back(section + ": key outside any section");
      continue;
    }
    if (!known_section(section)) {
      issues.push_back("[" + section + "]: unknown section");
      continue;
    }
    sc.sections_.push_back(section);
    for (const auto& [key, node] : body) {
      const KeySpec* spec = find_spec(section, key);
      if (!spec) {
        issues.push_back(full_key(section, key) + ": unknown key");
        continue;
      }
      Value v;
      if (auto err = convert(*spec, node.data(), v); !err.empty()) {
        issues.push_back(err);
        continue;
      }
      sc.values_[full_key(section, key)] = std::move(v);
    }
  }
  if (!sc.values_.contains("scenario.name")) issues.push_back("scenario.name: missing");
  if (!sc.values_.contains("scenario.kind")) issues.push_back("scenario.kind: missing");

  if (issues.empty()) {
    try {
      validate_scenario(sc);
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) {
    for (auto& i : issues) i = source + ": " + i;
    throw ConfigError(std::move(issues));
  }
  return sc;
}

Scenario Scenario::parse_text(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  return parse(is, source);
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  return parse(in, path.string());
}

std::string Scenario::serialize() const {
  std::ostringstream os;
  std::string current;
  for (const auto& spec : scenario_schema()) {
    const std::string id = full_key(spec.section, spec.key);
    const bool listed = std::find(sections_.begin(), sections_.end(), spec.section) != sections_.end();
    if (spec.section != current) {
      // Keep empty sections that were present: they select a kind's inputs.
      bool any = listed;
      for (const auto& s : scenario_schema())
        if (s.section == spec.section && values_.contains(full_key(s.section, s.key))) any = true;
      if (!any) continue;
      if (!current.empty()) os << '\n';
      os << '[' << spec.section << "]\n";
      current = spec.section;
    }
    if (auto it = values_.find(id); it != values_.end()) os << spec.key << " = " << value_text(it->second) << '\n';
  }
  return os.str();
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Scenario::hash() const { return fnv1a64(serialize()); }

const std::string& Scenario::name() const { return std::get<std::string>(values_.at("scenario.name")); }

ExperimentKind Scenario::kind() const {
  return parse_experiment_kind(std::get<std::string>(values_.at("scenario.kind")));
}

bool Scenario::has(const std::string& section, const std::string& key) const {
  return values_.contains(full_key(section, key));
}

bool Scenario::has_section(const std::string& section) const {
  if (std::find(sections_.begin(), sections_.end(), section) != sections_.end()) return true;
  for (const auto& [k, v] : values_)
    if (k.starts_with(section + ".")) return true;
  return false;
}

Scenario::Value Scenario::lookup(const std::string& section, const std::string& key) const {
  if (auto it = values_.find(full_key(section, key)); it != values_.end()) return it->second;
  const KeySpec* spec = find_spec(section, key);
  if (!spec) throw ConfigError(full_key(section, key) + ": not in schema");
  if (spec->default_value.empty()) throw ConfigError(full_key(section, key) + ": required but not set");
  Value v;
  if (auto err = convert(*spec, spec->default_value, v); !err.empty()) throw ConfigError(err);
  return v;
}

double Scenario::real(const std::string& section, const std::string& key) const {
  return std::get<double>(lookup(section, key));
}
std::uint64_t Scenario::integer(const std::string& section, const std::string& key) const {
  return std::get<std::uint64_t>(lookup(section, key));
}
std::string Scenario::text(const std::string& section, const std::string& key) const {
  return std::get<std::string>(lookup(section, key));
}
bool Scenario::flag(const std::string& section, const std::string& key) const {
  return std::get<bool>(lookup(section, key));
}
std::vector<double> Scenario::real_list(const std::string& section, const std::string& key) const {
  return std::get<std::vector<double>>(lookup(section, key));
}

void Scenario::set(const std::string& section, const std::string& key, const std::string& value_text) {
  const KeySpec* spec = find_spec(section, key);
  if (!spec) throw ConfigError(full_key(section, key) + ": unknown key");
  Value v;
  if (auto err = convert(*spec, value_text, v); !err.empty()) throw ConfigError(err);
  values_[full_key(section, key)] = std::move(v);
  if (std::find(sections_.begin(), sections_.end(), section) == sections_.end()) sections_.push_back(section);
}

void validate_scenario(const Scenario& sc) {
  std::vector<std::string> issues;
  const ExperimentKind kind = sc.kind();

  auto require_section = [&](const char* section) {
    if (!sc.has_section(section))
      issues.push_back(std::string("[") + section + "]: required for kind " + std::string(to_string(kind)));
  };
  auto require_key = [&](const char* section, const char* key) {
    if (!sc.has(section, key))
      issues.push_back(std::string(section) + "." + key + ": required for kind " + std::string(to_string(kind)));
  };

  // Each sweep key belongs to exactly one kind.
  const std::pair<const char*, ExperimentKind> sweep_owner[] = {
      {"storage_ns", ExperimentKind::lifetime_sweep},
      {"mean_photons", ExperimentKind::snr_sweep},
      {"optical_depth", ExperimentKind::efficiency_vs_depth},
      {"rabi_min_MHz", ExperimentKind::optimize_control},
      {"rabi_max_MHz", ExperimentKind::optimize_control},
  };
  for (const auto& [key, owner] : sweep_owner)
    if (sc.has("sweep", key) && owner != kind)
      issues.push_back(std::string("sweep.") + key + ": only used by kind " + std::string(to_string(owner)));
  if (sc.has_section("split") && kind != ExperimentKind::beam_splitter)
    issues.push_back("[split]: only used by kind beam_splitter");

  switch (kind) {
    case ExperimentKind::single_run:
      break;
    case ExperimentKind::lifetime_sweep:
      require_section("trials");
      require_key("sweep", "storage_ns");
      break;
    case ExperimentKind::snr_sweep:
      require_section("trials");
      require_key("sweep", "mean_photons");
      break;
    case ExperimentKind::noise_budget:
      require_section("trials");
      break;
    case ExperimentKind::beam_splitter:
      require_key("schedule", "readout_areas_pi");
      if (sc.flag("split", "tune") && sc.real_list("schedule", "readout_areas_pi").size() != 2)
        issues.push_back("split.tune: needs exactly two readouts in schedule.readout_areas_pi");
      break;
    case ExperimentKind::efficiency_vs_depth:
      require_key("sweep", "optical_depth");
      break;
    case ExperimentKind::optimize_control:
      require_key("sweep", "rabi_min_MHz");
      require_key("sweep", "rabi_max_MHz");
      if (sc.has("sweep", "rabi_min_MHz") && sc.has("sweep", "rabi_max_MHz") &&
          sc.real("sweep", "rabi_max_MHz") < sc.real("sweep", "rabi_min_MHz"))
        issues.push_back("sweep.rabi_max_MHz: must be >= sweep.rabi_min_MHz");
      break;
  }

  if (sc.has("trials", "bin_width_ns") || sc.has("trials", "window_ns")) {
    if (sc.real("trials", "window_ns") < sc.real("trials", "bin_width_ns"))
      issues.push_back("trials.window_ns: must be >= trials.bin_width_ns");
  }

  // Pulses, schedule and grid are checked by the modules themselves.
  try {
    const ProtocolSetup setup = build_setup(sc);
    validate_grid(setup);
    if (kind == ExperimentKind::efficiency_vs_depth) {
      for (double d : sc.real_list("sweep", "optical_depth")) {
        ProtocolSetup s = setup;
        s.ensemble = setup.ensemble.with_optical_depth(d);
        validate_grid(s);
      }
    }
  } catch (const ConfigError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  try {
    build_detector(sc).validate();
  } catch (const ConfigError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ProtocolSetup build_setup(const Scenario& sc) {
  ProtocolSetup s;
  const double us = 1e-6, ns = 1e-9;
  s.species = AtomSpecies::rubidium87(constants::two_pi * sc.real("species", "decay_rate_MHz") * 1e6);
  s.ensemble = EnsembleParams(sc.real("ensemble", "optical_depth"), sc.real("ensemble", "temperature_uK") * us,
                              sc.real("ensemble", "length_mm") * 1e-3,
                              sc.real("ensemble", "magnetic_lifetime_ns") * ns,
                              sc.real("ensemble", "overlap_efficiency"));

  const PulseShape shape = parse_pulse_shape(sc.text("pulse", "shape"));
  const FwhmConvention conv = parse_fwhm_convention(sc.text("pulse", "fwhm_convention"));
  const double probe_quoted = sc.real("pulse", "probe_duration_ns") * ns;
  const double control_quoted =
      sc.has("pulse", "control_duration_ns") ? sc.real("pulse", "control_duration_ns") * ns : probe_quoted;
  s.probe = PulseEnvelope::probe(shape, PulseEnvelope::probe_fwhm_from(probe_quoted, conv), 0.0);
  const double control_fwhm = PulseEnvelope::control_fwhm_from(control_quoted, conv);

  const double storage = sc.real("pulse", "storage_ns") * ns;
  const double spacing = sc.real("schedule", "readout_spacing_ns") * ns;
  std::vector<double> areas = sc.real_list("schedule", "readout_areas_pi");
  std::vector<double> centers;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    areas[i] *= constants::pi;
    centers.push_back(storage + static_cast<double>(i) * spacing);
  }
  s.schedule = ControlSchedule::from_areas(shape, control_fwhm, 0.0, sc.real("schedule", "write_area_pi") * constants::pi,
                                           centers, areas);

  s.grid.n_z = static_cast<int>(sc.integer("solver", "n_z"));
  s.grid.dt = sc.real("solver", "dt_ns") * ns;
  if (sc.flag("solver", "lossless")) s.options.optical_decay_rate = 0.0;
  s.options.hold_shortcut = sc.flag("solver", "hold_shortcut");

  const BeamGeometry geometry = build_geometry(sc);
  const WavenumberMode mode =
      sc.text("geometry", "wavenumber") == "exact" ? WavenumberMode::exact : WavenumberMode::approximate;
  s.decoherence = DecoherenceModel::from(s.species, s.ensemble,
                                         phase_matching(geometry, mode, s.species.ground_splitting()));
  if (!sc.flag("geometry", "motional_dephasing")) s.decoherence.delta_k_magnitude = 0.0;
  return s;
}

BeamGeometry build_geometry(const Scenario& sc) {
  BeamGeometry g;
  g.separation_angle = degrees_to_radians(sc.real("geometry", "angle_deg"));
  g.wavelength = AtomSpecies::rubidium87().transition_wavelength();
  return g;
}

DetectorModel build_detector(const Scenario& sc) {
  const double eta_t = sc.real("detector", "eta_t");
  DetectorModel m;
  if (sc.text("detector", "model") == "calibrated") {
    m = calibrate_detector(NoiseCalibrationData{}, eta_t);
  } else {
    m.downstream_transmission = eta_t;
  }
  const double ns = 1e-9;
  if (sc.has("detector", "dark_rate_per_s")) m.dark_ambient_rate = sc.real("detector", "dark_rate_per_s");
  if (sc.has("detector", "leakage_write")) m.leakage_write = sc.real("detector", "leakage_write");
  if (sc.has("detector", "leakage_read")) m.leakage_read = sc.real("detector", "leakage_read");
  if (sc.has("detector", "atom_leakage_write")) m.atom_leakage_write = sc.real("detector", "atom_leakage_write");
  if (sc.has("detector", "atom_leakage_read")) m.atom_leakage_read = sc.real("detector", "atom_leakage_read");
  if (sc.has("detector", "leakage_offset_ns")) m.leakage_time_offset = sc.real("detector", "leakage_offset_ns") * ns;
  if (sc.has("detector", "leakage_fwhm_ns")) m.leakage_spread_fwhm = sc.real("detector", "leakage_fwhm_ns") * ns;
  return m;
}

TrialConfig build_trials(const Scenario& sc, unsigned threads) {
  TrialConfig c;
  c.n_trials = sc.integer("trials", "n_trials");
  c.mean_photons_in = sc.real("trials", "mean_photons");
  c.bin_width = sc.real("trials", "bin_width_ns") * 1e-9;
  c.analysis_window = sc.real("trials", "window_ns") * 1e-9;
  c.rng_seed = sc.integer("trials", "seed");
  c.threads = threads;
  return c;
}

std::filesystem::path scenario_directory() {
  if (const char* env = std::getenv("ATSMEM_SCENARIO_DIR"); env && *env) return env;
  return ATSMEM_SCENARIO_DIR;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ini") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace atsmem
