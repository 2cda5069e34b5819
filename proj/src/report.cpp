#include "atsmem/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "atsmem/errors.hpp"

namespace atsmem {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + s + "' is not a number");
  }
}

}  // namespace

std::vector<ReferenceRow> read_reference(std::istream& is) {
  std::vector<ReferenceRow> rows;
  std::vector<std::string> issues;
  std::string line;
  long line_no = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv(line);
    if (header) {
      header = false;
      if (f.size() < 3 || f[0] != "key" || f[1] != "value" || f[2] != "sigma")
        throw ConfigError("reference header must be key,value,sigma");
      continue;
    }
    const std::string where = "reference line " + std::to_string(line_no);
    if (f.size() != 3) {
      issues.push_back(where + ": expected 3 fields");
      continue;
    }
    try {
      ReferenceRow r{f[0], to_double(f[1], where), to_double(f[2], where)};
      if (r.sigma < 0) throw ConfigError(where + ": sigma must be >= 0");
      rows.push_back(r);
    } catch (const ConfigError& e) {
      issues.push_back(e.what());
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return rows;
}

std::vector<ReferenceRow> read_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open reference " + path.string());
  return read_reference(in);
}

std::map<std::string, double> read_metrics(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "metrics.csv" : path;
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open report metrics " + file.string());
  std::map<std::string, double> out;
  std::string line;
  std::getline(in, line);
  if (split_csv(line).empty() || split_csv(line)[0] != "key") throw ConfigError(file.string() + ": not a metrics table");
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split_csv(line);
    if (f.size() < 2) continue;
    out[f[0]] = f[1] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                              : to_double(f[1], file.string() + ":" + std::to_string(line_no));
  }
  return out;
}

bool Comparison::passed() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::vector<std::string> Comparison::missing_keys() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (r.missing) out.push_back(r.key);
  return out;
}

Comparison compare_to_reference(const std::map<std::string, double>& simulated,
                                 const std::vector<ReferenceRow>& reference, double threshold) {
  Comparison c;
  c.threshold = threshold;
  for (const auto& ref : reference) {
    ComparisonRow row;
    row.key = ref.key;
    row.reference = ref.value;
    row.sigma = ref.sigma;
    const auto it = simulated.find(ref.key);
    if (it == simulated.end()) {
      row.missing = true;
      row.z = std::numeric_limits<double>::quiet_NaN();
      c.rows.push_back(row);
      continue;
    }
    row.simulated = it->second;
    const double diff = row.simulated - row.reference;
    if (ref.sigma > 0) {
      row.z = diff / ref.sigma;
    } else {
      row.z = diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    row.pass = std::isfinite(row.z) && std::abs(row.z) <= threshold;
    c.rows.push_back(row);
  }
  return c;
}

void write_comparison(std::ostream& os, const Comparison& comparison) {
  char line[256];
  for (const auto& r : comparison.rows) {
    if (r.missing) {
      std::snprintf(line, sizeof line, "FAIL %-28s missing from report\n", r.key.c_str());
    } else {
      std::snprintf(line, sizeof line, "%s %-28s sim=%-12.6g ref=%-12.6g sigma=%-10.4g z=%+.2f\n",
                    r.pass ? "PASS" : "FAIL", r.key.c_str(), r.simulated, r.reference, r.sigma, r.z);
    }
    os << line;
  }
  const auto missing = comparison.missing_keys();
  if (!missing.empty()) {
    os << "missing rows:";
    for (const auto& k : missing) os << ' ' << k;
    os << '\n';
  }
  os << (comparison.passed() ? "comparison passed" : "comparison failed") << " (threshold |z| <= "
     << comparison.threshold << ")\n";
}

}  // namespace atsmem
