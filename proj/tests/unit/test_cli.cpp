#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "paracurves/cli.hpp"

using paracurves::cli::Outcome;
using paracurves::cli::RunOptions;
using paracurves::cli::run;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json report_of(const Outcome& o) { return json::parse(o.report); }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("paracurves_cli_" + name);
  fs::remove_all(p);
  return p;
}

const char* kLegendreanEinstein = R"({
  "id": "leg",
  "geometry": "legendrean",
  "data": {
    "n": 2,
    "samples": [
      {"P": [[1, 0], [0, 1]], "A_lo": [[0, 0], [0, 0]], "A_hi": [[0, 0], [0, 0]],
       "T_lo": [0, 0], "T_hi": [0, 0]}
    ]
  },
  "expect_lambda": 1
})";

}  // namespace

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(paracurves::cli::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(paracurves::cli::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(paracurves::cli::fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Cli, SymalgDimensions) {
  for (const char* geo : {"conformal", "legendrean", "cr"}) {
    std::string cfg = std::string(R"({"geometry": ")") + geo + R"(", "n": 3, "seed": 5})";
    Outcome o = run("symalg", cfg);
    ASSERT_EQ(o.exit_code, 0) << o.report;
    json r = report_of(o);
    EXPECT_TRUE(r["pass"].get<bool>());
    EXPECT_EQ(r["payload"]["dim_sym"], r["payload"]["expected_sym_dim"]);
    EXPECT_EQ(r["payload"]["sym_basis"].size(), r["payload"]["dim_sym"].get<std::size_t>());
  }
}

TEST(Cli, ByteIdenticalForFixedSeed) {
  const std::string cfg = R"({"geometry": "cr", "n": 2, "seed": 11})";
  EXPECT_EQ(run("symalg", cfg).report, run("symalg", cfg).report);
  RunOptions other;
  other.seed = 12;
  EXPECT_NE(run("symalg", cfg).report, run("symalg", cfg, other).report);
}

TEST(Cli, ConfigHashIgnoresFormatting) {
  json a = report_of(run("symalg", R"({"geometry": "conformal", "n": 3})"));
  json b = report_of(run("symalg", "{\n  \"n\" : 3,\n  \"geometry\":\"conformal\"\n}"));
  json c = report_of(run("symalg", R"({"geometry": "conformal", "n": 4})"));
  EXPECT_EQ(a["config_hash"], b["config_hash"]);
  EXPECT_NE(a["config_hash"], c["config_hash"]);
}

TEST(Cli, SchemaErrorsCarryLines) {
  Outcome o = run("symalg", "{\n  \"geometry\": \"conformal\",\n  \"n\": 3,\n  \"typo\": 1\n}");
  EXPECT_EQ(o.exit_code, paracurves::cli::kConfigError);
  EXPECT_EQ(report_of(o)["error"]["line"], 4);
  o = run("integrate", "{\n  \"metric\": {\"catalog\": \"torus\", \"n\": 3},\n  \"kind\": \"geodesic\"\n}");
  EXPECT_EQ(o.exit_code, paracurves::cli::kConfigError);
  EXPECT_EQ(report_of(o)["error"]["line"], 2);
  EXPECT_EQ(run("symalg", "{ not json").exit_code, paracurves::cli::kConfigError);
  EXPECT_EQ(run("bogus", "{}").exit_code, paracurves::cli::kConfigError);
}

TEST(Cli, PreconditionsAreConfigErrors) {
  // u must be unit
  EXPECT_EQ(run("symalg", R"({"geometry": "conformal", "n": 3, "u": [1, 1, 0]})").exit_code, 2);
  // Legendrean pairing must be 1
  EXPECT_EQ(run("symalg", R"({"geometry": "legendrean", "n": 2, "u": [1, 0], "v": [2, 0]})").exit_code, 2);
  // x0 outside the hyperbolic ball
  EXPECT_EQ(run("integrate", R"({"metric": {"catalog": "hyperbolic", "n": 3}, "kind": "geodesic",
                                 "x0": [2, 0, 0], "u0": [1, 0, 0], "length": 0.1})")
                .exit_code,
            2);
}

TEST(Cli, IntegrateWritesCsvAndReport) {
  RunOptions opt;
  opt.out_dir = scratch("integrate").string();
  Outcome o = run("integrate", R"({"id": "circle", "metric": {"catalog": "flat", "n": 3},
    "kind": "conformal_circle", "x0": [0, 0, 0], "u0": [1, 0, 0], "c0": [0, 1, 0],
    "length": 0.5, "step": 0.01})",
                  opt);
  ASSERT_EQ(o.exit_code, 0) << o.report;
  json r = report_of(o);
  EXPECT_EQ(r["payload"]["csv"], "circle.csv");
  EXPECT_LT(r["payload"]["max_residual"].get<double>(), 1e-8);
  std::ifstream csv(fs::path(opt.out_dir) / "circle.csv");
  ASSERT_TRUE(csv.good());
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("t,", 0), 0u);
  std::ifstream rep(fs::path(opt.out_dir) / "circle.json");
  std::stringstream ss;
  ss << rep.rdbuf();
  EXPECT_EQ(ss.str(), o.report);
}

TEST(Cli, GeodesicOnNonEinsteinFailsCheck) {
  Outcome o = run("integrate", R"({"metric": {"catalog": "non_einstein", "n": 4}, "kind": "geodesic",
    "x0": [0.4, 0.1, -0.2, 0.1], "u0": [0.3, 1, -0.5, 0.7], "length": 0.2, "normalize": true})");
  EXPECT_EQ(o.exit_code, paracurves::cli::kCheckFailure) << o.report;
  EXPECT_GT(report_of(o)["payload"]["max_residual"].get<double>(), 1e-3);
}

TEST(Cli, RiemannianChecks) {
  Outcome e = run("check", R"({"geometry": "riemannian", "metric": {"catalog": "sphere", "n": 4}, "expect_lambda": 0.5})");
  EXPECT_EQ(e.exit_code, 0) << e.report;
  Outcome c = run("check", R"({"geometry": "riemannian", "test": "closure", "geodesics": 2,
    "metric": {"catalog": "hyperbolic", "n": 3}, "seed": 4})");
  EXPECT_EQ(c.exit_code, 0) << c.report;
  Outcome ne = run("check", R"({"geometry": "riemannian", "metric": {"catalog": "non_einstein", "n": 4}})");
  EXPECT_EQ(ne.exit_code, 1);
}

TEST(Cli, LegendreanAndCrChecks) {
  Outcome o = run("check", kLegendreanEinstein);
  EXPECT_EQ(o.exit_code, 0) << o.report;
  EXPECT_DOUBLE_EQ(report_of(o)["payload"]["lambda"].get<double>(), 1.0);

  Outcome probe = run("check", R"({"geometry": "legendrean", "test": "probe", "seed": 2, "data": {"n": 2,
    "samples": [{"P": [[1, 0], [0, 1]], "A_lo": [[0, 0], [0, 0]], "A_hi": [[0, 0], [0, 0]],
                 "T_lo": [0.5, 0], "T_hi": [0, 0]}]}})");
  ASSERT_EQ(probe.exit_code, 0) << probe.report;
  json pr = report_of(probe)["payload"]["results"][0];
  EXPECT_FALSE(pr["einstein_pass"].get<bool>());
  EXPECT_TRUE(pr["witness_found"].get<bool>());

  Outcome cr = run("check", R"({"geometry": "cr", "expect_lambda": 2, "data": {"n": 2,
    "samples": [{"h": [[1, 0], [0, -1]], "P": [[2, 0], [0, -2]], "A": [[0, 0], [0, 0]], "T": [0, [0, 0]]}]}})");
  EXPECT_EQ(cr.exit_code, 0) << cr.report;
}

TEST(Cli, FixturePathsResolveAgainstBaseDir) {
  fs::path dir = scratch("fixture");
  fs::create_directories(dir);
  std::ofstream(dir / "fx.json") << R"({"n": 1, "samples": [{"P": [[0]], "A_lo": [[0]], "A_hi": [[0]], "T_lo": [0], "T_hi": [0]}]})";
  RunOptions opt;
  opt.base_dir = dir.string();
  Outcome o = run("check", R"({"geometry": "legendrean", "fixture": "fx.json", "expect_lambda": 0})", opt);
  EXPECT_EQ(o.exit_code, 0) << o.report;
  EXPECT_EQ(run("check", R"({"geometry": "legendrean", "fixture": "missing.json"})", opt).exit_code, 2);
}

TEST(Cli, SuiteRecordsSkippedFixtures) {
  Outcome o = run("suite", R"({"criteria": [10, 1], "seed": 3})");
  ASSERT_EQ(o.exit_code, 0) << o.report;
  json r = report_of(o);
  ASSERT_EQ(r["payload"]["scenarios"].size(), 2u);
  EXPECT_EQ(r["payload"]["scenarios"][0]["id"], "criterion_01");
  EXPECT_EQ(r["payload"]["scenarios"][1]["id"], "criterion_10");
  EXPECT_EQ(r["payload"]["skipped"].size(), 2u);
  EXPECT_EQ(run("suite", R"({"criteria": [11]})").exit_code, 2);
}
