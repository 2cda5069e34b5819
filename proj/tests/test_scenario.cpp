#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "atsmem/errors.hpp"
#include "atsmem/report.hpp"
#include "atsmem/runner.hpp"
#include "atsmem/scenario.hpp"
#include "doctest.h"

using namespace atsmem;

namespace {
const char* kBasic = R"(; comment line
[scenario]
name = basic
kind = single_run

[ensemble]
optical_depth = 7.5
temperature_uK = 40

[geometry]
angle_deg = 2

[pulse]
probe_duration_ns = 25
storage_ns = 180
)";

std::string error_text(const std::string& text) {
  try {
    Scenario::parse_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("parse and typed access") {
  const auto sc = Scenario::parse_text(kBasic);
  CHECK(sc.name() == "basic");
  CHECK(sc.kind() == ExperimentKind::single_run);
  CHECK(sc.real("ensemble", "optical_depth") == 7.5);
  CHECK(sc.real("geometry", "angle_deg") == 2.0);
  // unset keys fall back to the schema default
  CHECK(sc.real("solver", "dt_ns") == doctest::Approx(0.05));
  CHECK(sc.integer("solver", "n_z") == 128);
  CHECK_FALSE(sc.has("solver", "n_z"));
  CHECK(sc.has_section("pulse"));

  const auto setup = build_setup(sc);
  CHECK(setup.ensemble.optical_depth() == 7.5);
}

TEST_CASE("serialize round trip") {
  const auto a = Scenario::parse_text(kBasic);
  const auto text = a.serialize();
  const auto b = Scenario::parse_text(text);
  CHECK(a == b);
  CHECK(b.serialize() == text);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() == fnv1a64(text));

  auto c = a;
  c.set("ensemble", "optical_depth", "7.6");
  CHECK_FALSE(c == a);
  CHECK(c.hash() != a.hash());
}

TEST_CASE("shortest number formatting survives a round trip") {
  auto a = Scenario::parse_text(kBasic);
  a.set("ensemble", "length_mm", "0.1");
  a.set("ensemble", "temperature_uK", "33.333333333333336");
  const auto b = Scenario::parse_text(a.serialize());
  CHECK(b.real("ensemble", "length_mm") == 0.1);
  CHECK(b.real("ensemble", "temperature_uK") == 33.333333333333336);
}

TEST_CASE("every offending key is reported") {
  const std::string bad = std::string(kBasic) +
                          "\n[solver]\nn_z = 8\nfoo = 1\n\n[ensemble_typo]\nx = 1\n"
                          "\n[trials]\nseed = -4\n";
  const auto msg = error_text(bad);
  CHECK(msg.find("n_z") != std::string::npos);
  CHECK(msg.find("foo") != std::string::npos);
  CHECK(msg.find("ensemble_typo") != std::string::npos);
  CHECK(msg.find("seed") != std::string::npos);
}

TEST_CASE("malformed values") {
  CHECK(error_text("[scenario]\nname = x\nkind = warp\n").find("kind") != std::string::npos);
  CHECK(error_text("[scenario]\nname = x\nkind = single_run\n[ensemble]\noptical_depth = ten\n")
            .find("optical_depth") != std::string::npos);
  CHECK(error_text("[scenario]\nname = x\nkind = single_run\n[geometry]\nangle_deg = 190\n")
            .find("angle_deg") != std::string::npos);
  CHECK(error_text("[scenario]\nkind = single_run\n").find("name") != std::string::npos);
  CHECK_FALSE(error_text("[scenario]\nname = x\n").empty());
}

TEST_CASE("sweep requirements") {
  const std::string head = "[scenario]\nname = s\nkind = lifetime_sweep\n";
  CHECK(error_text(head + "[trials]\nn_trials = 100\n[sweep]\nstorage_ns =\n").find("storage_ns") !=
        std::string::npos);
  CHECK(error_text(head + "[trials]\nn_trials = 100\n").find("storage_ns") != std::string::npos);
  CHECK(error_text(head + "[trials]\nn_trials = 100\n[sweep]\nstorage_ns = 200, x\n").find("storage_ns") !=
        std::string::npos);
  CHECK(error_text(head + "[trials]\nn_trials = 100\n[sweep]\nstorage_ns = 200, 400\n").empty());
  // keys owned by another kind
  CHECK_FALSE(error_text(head + "[trials]\nn_trials = 100\n[sweep]\nstorage_ns = 200\nmean_photons = 1\n").empty());
  CHECK_FALSE(error_text("[scenario]\nname = s\nkind = optimize_control\n[sweep]\nrabi_min_MHz = 30\n"
                         "rabi_max_MHz = 20\n")
                  .empty());
  CHECK_FALSE(error_text("[scenario]\nname = s\nkind = beam_splitter\n[schedule]\nreadout_areas_pi = 1, 1, 2\n"
                         "[split]\ntune = true\n")
                  .empty());
}

TEST_CASE("grid problems surface at validation") {
  const auto msg = error_text(std::string(kBasic) + "[solver]\ndt_ns = 20\n");
  CHECK_FALSE(msg.empty());
}

TEST_CASE("comparison against a reference") {
  std::istringstream ref("# notes\nkey,value,sigma\nefficiency,0.38,0.05\nexact,3,0\nabsent,1,1\n");
  const auto rows = read_reference(ref);
  REQUIRE(rows.size() == 3);

  auto c = compare_to_reference({{"efficiency", 0.38}, {"exact", 3.0}}, rows);
  CHECK(c.rows[0].pass);
  CHECK(c.rows[0].z == doctest::Approx(0.0));
  CHECK(c.rows[1].pass);
  CHECK_FALSE(c.rows[2].pass);
  CHECK(c.rows[2].missing);
  CHECK(c.missing_keys() == std::vector<std::string>{"absent"});
  CHECK_FALSE(c.passed());

  c = compare_to_reference({{"efficiency", 0.10}, {"exact", 3.0000001}, {"absent", 1.0}}, rows);
  CHECK(c.rows[0].z == doctest::Approx(-5.6));
  CHECK_FALSE(c.rows[0].pass);
  CHECK_FALSE(c.rows[1].pass);
  CHECK(c.rows[2].pass);

  std::ostringstream os;
  write_comparison(os, c);
  CHECK(os.str().find("FAIL efficiency") != std::string::npos);
  CHECK(os.str().find("comparison failed") != std::string::npos);

  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_reference(bad_header), ConfigError);
  std::istringstream bad_row("key,value,sigma\nx,1\ny,z,1\nw,1,-1\n");
  try {
    read_reference(bad_row);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    CHECK(m.find("line 2") != std::string::npos);
    CHECK(m.find("line 3") != std::string::npos);
    CHECK(m.find("line 4") != std::string::npos);
  }
}

TEST_CASE("run reports are deterministic") {
  const auto sc = Scenario::parse_text(std::string(kBasic) +
                                       "[solver]\nn_z = 48\n[trials]\nn_trials = 20000\nmean_photons = 0.5\n");
  RunOptions o1;
  o1.threads = 1;
  RunOptions o2;
  o2.threads = 3;
  const auto a = run_scenario(sc, o1);
  const auto b = run_scenario(sc, o2);
  REQUIRE(a.metrics.size() == b.metrics.size());
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    CHECK(a.metrics[i].key == b.metrics[i].key);
    CHECK(a.metrics[i].value == b.metrics[i].value);
  }
  CHECK(a.config_hash == sc.hash());
  CHECK(a.metric("bookkeeping_sum") == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS(a.metric("no_such_metric"));

  const auto dir = std::filesystem::temp_directory_path() / "atsmem_test_report";
  std::filesystem::remove_all(dir);
  write_report(a, dir);
  for (const char* f : {"results.csv", "metrics.csv", "scenario.ini", "summary.txt"})
    CHECK(std::filesystem::exists(dir / f));
  const auto metrics = read_metrics(dir);
  CHECK(metrics.at("efficiency") == a.metric("efficiency"));
  CHECK(Scenario::load(dir / "scenario.ini") == sc);
  std::filesystem::remove_all(dir);
}

TEST_CASE("derived seeds differ per arm") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("bundled scenarios validate") {
  const auto files = list_scenarios(scenario_directory());
  CHECK(files.size() >= 7);
  for (const auto& f : files) {
    CAPTURE(f.string());
    CHECK_NOTHROW(Scenario::load(f));
  }
}
