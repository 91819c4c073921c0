#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "protorus/cli.hpp"

using namespace protorus;
using cli::json;

namespace {

std::string fixture(const char* name) { return std::string(PROTORUS_FIXTURES) + "/" + name; }
std::string sample(const char* name) { return std::string(PROTORUS_SAMPLES) + "/" + name; }

cli::RunResult run_file(const std::string& command, const std::string& path, const std::string& format = "json") {
  cli::RunConfig rc;
  rc.command = command;
  rc.config_path = path;
  rc.format = format;
  return cli::run(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int exit_status(int raw) {
#ifdef WEXITSTATUS
  return WEXITSTATUS(raw);
#else
  return raw;
#endif
}

}  // namespace

TEST(Validate, MissingAnchorMessage) {
  auto v = cli::validate_config_file(fixture("missing_anchor.json"));
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.errors.empty());
  EXPECT_EQ(v.errors[0], "generators.theta: anchor required");
}

TEST(Validate, NegativeNMessage) {
  auto v = cli::validate_config_file(fixture("negative_n.json"));
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.errors.empty());
  EXPECT_EQ(v.errors[0], "N must be \xe2\x89\xa5 2");
}

TEST(Validate, OtherSchemaErrors) {
  EXPECT_FALSE(cli::validate_config(json::array()).ok);
  EXPECT_FALSE(cli::validate_config({{"command", "frobnicate"}}).ok);
  EXPECT_FALSE(cli::validate_config({{"horizon", 0}}).ok);
  EXPECT_FALSE(cli::validate_config({{"radius", "-1"}}).ok);
  EXPECT_FALSE(cli::validate_config_file(fixture("does_not_exist.json")).ok);
  EXPECT_TRUE(cli::validate_config_file(fixture("solenoid.json")).ok);
}

TEST(Validate, SamplesAreValid) {
  for (auto& e : std::filesystem::directory_iterator(PROTORUS_SAMPLES)) {
    auto v = cli::validate_config_file(e.path().string());
    EXPECT_TRUE(v.ok) << e.path() << ": " << (v.errors.empty() ? "" : v.errors[0]);
  }
}

TEST(Run, UndecidedFixtureExitsTwo) {
  auto r = run_file("check-hom", fixture("undecided.json"));
  EXPECT_EQ(r.exit_code, cli::Undecided);
  auto j = json::parse(r.output);
  EXPECT_EQ(j["verdict"], "Undecided");
  EXPECT_EQ(j["exit_code"], 2);
}

TEST(Run, BadConfigsExitOne) {
  auto a = run_file("invariant", fixture("missing_anchor.json"));
  EXPECT_EQ(a.exit_code, cli::Failure);
  EXPECT_NE(a.error.find("generators.theta: anchor required"), std::string::npos);
  EXPECT_EQ(run_file("invariant", fixture("negative_n.json")).exit_code, cli::Failure);
  EXPECT_EQ(run_file("invariant", fixture("missing.json")).exit_code, cli::Failure);
  EXPECT_EQ(run_file("invariant", fixture("solenoid.json"), "yaml").exit_code, cli::Failure);
}

TEST(Run, SolenoidInvariantReport) {
  auto r = run_file("invariant", fixture("solenoid.json"));
  ASSERT_EQ(r.exit_code, cli::Success) << r.error;
  auto j = json::parse(r.output);
  EXPECT_EQ(j["tool"], "protorus");
  EXPECT_EQ(j["version"], "0.1.0");
  EXPECT_EQ(j["command"], "invariant");
  EXPECT_EQ(j["verdict"], "Unital");
  EXPECT_EQ(j["result"]["divisibility"]["divisible"], true);
}

TEST(Run, ClassifyExitCodes) {
  auto r = run_file("classify", sample("classify_pair.json"));
  ASSERT_EQ(r.exit_code, cli::Success) << r.error;
  EXPECT_EQ(json::parse(r.output)["verdict"], "Isomorphic");
  cli::RunConfig rc;
  rc.command = "classify";
  rc.config_path = sample("classify_pair.json");
  rc.overrides = {{"pair", json::array({cli::parse_pair_member("solenoid(theta,2)"), cli::parse_pair_member("solenoid(theta,6)")})}};
  auto n = cli::run(rc);
  EXPECT_EQ(n.exit_code, cli::Success);
  auto j = json::parse(n.output);
  EXPECT_EQ(j["verdict"], "NotIsomorphic");
  EXPECT_EQ(j["result"]["obstruction"].get<std::string>().rfind("PrimeSets", 0), 0u);
  rc.overrides["independent"] = false;
  rc.overrides["pair"] = json::array({cli::parse_pair_member("solenoid(theta,2)"), cli::parse_pair_member("solenoid(theta',4)")});
  rc.overrides["generators"] = {{"theta'", {{"anchor", "0.618"}, {"radius", "1e-6"}}}};
  EXPECT_EQ(cli::run(rc).exit_code, cli::Undecided);
}

TEST(Run, DeterministicAcrossRuns) {
  for (const char* s : {"solenoid.json", "ax7.json", "flat_spectrum.json", "cutdown.json", "commutator.json"}) {
    std::string cmd = json::parse(slurp(sample(s)))["command"];
    auto a = run_file(cmd, sample(s)), b = run_file(cmd, sample(s));
    EXPECT_EQ(a.exit_code, b.exit_code) << s;
    EXPECT_EQ(a.output, b.output) << s;
    EXPECT_FALSE(a.output.empty()) << s << ": " << a.error;
  }
}

TEST(Run, SpectrumFormats) {
  auto j = json::parse(run_file("spectrum", sample("flat_spectrum.json")).output);
  EXPECT_EQ(j["result"]["count"], 10);
  EXPECT_EQ(j["result"]["ball"], "CertifiedFinite");
  auto csv = run_file("spectrum", sample("flat_spectrum.json"), "csv").output;
  EXPECT_EQ(csv.rfind("label,eigenvalue\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  auto table = run_file("spectrum", sample("flat_spectrum.json"), "table").output;
  EXPECT_NE(table.find("verdict  CertifiedFinite"), std::string::npos);
}

TEST(Run, CutdownAndCommutator) {
  auto c = json::parse(run_file("cutdown", sample("cutdown.json")).output);
  EXPECT_EQ(c["result"]["count"], 8);
  cli::RunConfig rc;
  rc.command = "cutdown";
  rc.config_path = sample("cutdown.json");
  rc.overrides = {{"cut", nullptr}};
  EXPECT_EQ(json::parse(cli::run(rc).output)["result"]["kind"], "Unbounded");
  auto m = json::parse(run_file("commutator", sample("commutator.json")).output);
  EXPECT_EQ(m["verdict"], "Exact");
}

TEST(Run, OutFileMatchesStdoutReport) {
  auto path = (std::filesystem::temp_directory_path() / "protorus_out_test.json").string();
  cli::RunConfig rc;
  rc.command = "classify";
  rc.config_path = sample("classify_pair.json");
  rc.out = path;
  auto r = cli::run(rc);
  EXPECT_EQ(slurp(path), r.output);
  std::remove(path.c_str());
}

TEST(Parse, PairMembers) {
  auto s = cli::parse_pair_member("solenoid(θ, 4)");
  EXPECT_EQ(s["family"], "solenoid");
  EXPECT_EQ(s["theta"], "theta");
  EXPECT_EQ(s["N"], 4);
  auto a = cli::parse_pair_member("ax7(3,theta0)");
  EXPECT_EQ(a["N"], 3);
  EXPECT_EQ(a["theta0"], "theta0");
  EXPECT_THROW(cli::parse_pair_member("solenoid"), Error);
  EXPECT_THROW(cli::parse_pair_member("dimension-changing(a,b)"), Error);
}

TEST(Parse, Radii) {
  EXPECT_DOUBLE_EQ(cli::parse_radius("3/2"), 1.5);
  EXPECT_NEAR(cli::parse_radius("8pi"), 8 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(cli::parse_radius("2*pi"), 2 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(cli::parse_radius("pi"), std::numbers::pi, 1e-12);
  EXPECT_THROW(cli::parse_radius("0"), Error);
  auto a = cli::parse_anchor_flag("0.618/1e-6");
  EXPECT_EQ(a["anchor"], "0.618");
  EXPECT_EQ(a["radius"], "1e-6");
}

TEST(Binary, ExitCodesAndDeterminism) {
  std::string bin = PROTORUS_CLI_PATH;
  auto tmp = std::filesystem::temp_directory_path();
  auto o1 = (tmp / "protorus_bin_1.json").string(), o2 = (tmp / "protorus_bin_2.json").string();
  std::string base = "\"" + bin + "\" invariant --config \"" + fixture("solenoid.json") + "\" --out ";
  EXPECT_EQ(exit_status(std::system((base + "\"" + o1 + "\"").c_str())), 0);
  EXPECT_EQ(exit_status(std::system((base + "\"" + o2 + "\"").c_str())), 0);
  EXPECT_EQ(slurp(o1), slurp(o2));
  EXPECT_FALSE(slurp(o1).empty());
  std::string und = "\"" + bin + "\" check-hom --config \"" + fixture("undecided.json") + "\" > /dev/null";
  EXPECT_EQ(exit_status(std::system(und.c_str())), 2);
  std::string bad = "\"" + bin + "\" invariant --config \"" + fixture("missing_anchor.json") + "\" 2> /dev/null";
  EXPECT_EQ(exit_status(std::system(bad.c_str())), 1);
  std::string pair = "\"" + bin + "\" classify --theta-anchor 0.618/1e-6 --pair \"solenoid(theta,2)\" \"solenoid(theta,4)\" > /dev/null";
  EXPECT_EQ(exit_status(std::system(pair.c_str())), 0);
  std::remove(o1.c_str());
  std::remove(o2.c_str());
}
