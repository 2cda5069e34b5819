#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "atsmem/errors.hpp"
#include "atsmem/parallel.hpp"
#include "atsmem/report.hpp"
#include "atsmem/runner.hpp"
#include "atsmem/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3, kCompareFailed = 4 };

std::filesystem::path resolve_scenario(const std::string& arg) {
  std::filesystem::path p(arg);
  if (std::filesystem::exists(p)) return p;
  // Bare names refer to the bundled set.
  auto bundled = atsmem::scenario_directory() / p;
  if (!bundled.has_extension()) bundled += ".ini";
  if (std::filesystem::exists(bundled)) return bundled;
  return p;
}

void print_issues(const atsmem::ConfigError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& i : e.issues()) std::cerr << "  " << i << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ATS quantum-memory simulator"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = atsmem::default_thread_count();

  auto* run = app.add_subcommand("run", "run a scenario and write its report");
  run->add_option("scenario", scenario_arg, "scenario file or bundled name")->required();
  run->add_option("--out", out_dir, "output directory (default $ATSMEM_OUT_DIR or ./atsmem-out)");
  run->add_option("--seed", seed, "override trials.seed");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_arg, "scenario file or bundled name")->required();
  bool print_canonical = false;
  validate->add_flag("--canonical", print_canonical, "print the canonical form");

  std::string report_path, reference_path;
  double threshold = 2.0;
  auto* compare = app.add_subcommand("compare", "compare report metrics with a reference table");
  compare->add_option("report", report_path, "report directory or metrics.csv")->required();
  compare->add_option("reference", reference_path, "reference CSV (key,value,sigma)")->required();
  compare->add_option("--threshold", threshold, "largest accepted |z|")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-scenarios", "list bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*list) {
      for (const auto& p : atsmem::list_scenarios(atsmem::scenario_directory())) {
        try {
          const auto sc = atsmem::Scenario::load(p);
          std::cout << p.stem().string() << "  " << atsmem::to_string(sc.kind()) << "  " << p.string() << '\n';
        } catch (const atsmem::ConfigError&) {
          std::cout << p.stem().string() << "  (invalid)  " << p.string() << '\n';
        }
      }
      return kOk;
    }
    if (*validate) {
      const auto sc = atsmem::Scenario::load(resolve_scenario(scenario_arg));
      if (print_canonical) std::cout << sc.serialize();
      else std::cout << sc.name() << ": valid (" << atsmem::to_string(sc.kind()) << ")\n";
      return kOk;
    }
    if (*run) {
      const auto sc = atsmem::Scenario::load(resolve_scenario(scenario_arg));
      atsmem::RunOptions opt;
      opt.seed = seed;
      opt.threads = threads;
      const auto report = atsmem::run_scenario(sc, opt);
      const std::filesystem::path base = out_dir.empty() ? atsmem::default_output_directory() : std::filesystem::path(out_dir);
      const auto dir = base / sc.name();
      atsmem::write_report(report, dir);
      std::cout << "wrote " << dir.string() << " (" << report.wall_seconds << " s)\n";
      for (const auto& m : report.metrics) std::cout << "  " << m.key << " = " << m.value << '\n';
      return kOk;
    }
    if (*compare) {
      const auto comparison = atsmem::compare_to_reference(atsmem::read_metrics(report_path),
                                                           atsmem::read_reference(reference_path), threshold);
      atsmem::write_comparison(std::cout, comparison);
      return comparison.passed() ? kOk : kCompareFailed;
    }
  } catch (const atsmem::ConfigError& e) {
    print_issues(e);
    return kValidation;
  } catch (const atsmem::DomainError& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kValidation;
  } catch (const atsmem::NumericalError& e) {
    const auto& r = e.record();
    std::cerr << "numerical failure: " << e.what() << "\n  step " << r.step << " t=" << r.time
              << " s |E|^2=" << r.field_norm << " |P|^2=" << r.optical_norm << " |S|^2=" << r.spin_norm << '\n';
    return kNumerical;
  } catch (const atsmem::FitError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
