#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace atsmem {

struct ReferenceRow {
  std::string key;
  double value = 0.0;
  double sigma = 0.0;
};

// CSV with header key,value,sigma; '#' lines are comments.
std::vector<ReferenceRow> read_reference(std::istream& is);
std::vector<ReferenceRow> read_reference(const std::filesystem::path& path);

// metrics.csv of a report (key,value,stderr). Accepts the report directory or
// the file itself.
std::map<std::string, double> read_metrics(const std::filesystem::path& path);

struct ComparisonRow {
  std::string key;
  double simulated = 0.0;
  double reference = 0.0;
  double sigma = 0.0;
  double z = 0.0;
  bool missing = false;
  bool pass = false;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double threshold = 2.0;
  bool passed() const;
  std::vector<std::string> missing_keys() const;
};

// z = (simulated - reference) / sigma, pass iff |z| <= threshold. With
// sigma = 0 only an exact match passes. Rows absent from the report fail.
Comparison compare_to_reference(const std::map<std::string, double>& simulated,
                                 const std::vector<ReferenceRow>& reference, double threshold = 2.0);

void write_comparison(std::ostream& os, const Comparison& comparison);

}  // namespace atsmem
