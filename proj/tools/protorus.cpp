#include <iostream>

#include <CLI11.hpp>

#include "protorus/cli.hpp"

using protorus::cli::json;

int main(int argc, char** argv) {
  CLI::App app{"Elliott invariants of protori and Fourier-multiplier spectral checks"};
  app.set_version_flag("--version", std::string(protorus::cli::kVersion));
  app.require_subcommand(1);

  protorus::cli::RunConfig rc;
  std::string config, radius, format = "json", out;
  long horizon = 0;
  std::string family, theta_anchor, multiplier, shift;
  long N = 0, depth = 0, cut = -1;
  std::vector<std::string> pair;
  bool no_cut = false, no_independence = false;

  for (const auto& name : protorus::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--horizon", horizon, "number of connecting maps to inspect")->check(CLI::PositiveNumber);
    sub->add_option("--radius", radius, "spectral radius (rational, optional 'pi' suffix)");
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "table", "csv"}));
    sub->add_option("--out", out, "write the report here instead of stdout");
    sub->add_option("--family", family, "builtin family: solenoid, ax7, ...");
    sub->add_option("--theta-anchor", theta_anchor, "anchor for theta as mid/radius");
    sub->add_option("--N", N, "family or multiplier parameter N");
    sub->add_option("--pair", pair, "two systems to classify, e.g. solenoid(theta,2) solenoid(theta,4)")->expected(2);
    sub->add_option("--multiplier", multiplier, "builtin multiplier: flat, flat-limit, length-N, weighted-omega, ...");
    sub->add_option("--depth", depth, "witness depth for limit-label diagnostics");
    sub->add_option("--cut", cut, "stage cut for cut-down counting");
    sub->add_flag("--no-cut", no_cut, "omit the stage cut");
    sub->add_option("--shift", shift, "monomial shift as comma separated coordinates");
    sub->add_flag("--no-independence", no_independence, "drop the rational independence assertion on generators");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    rc.command = app.get_subcommands().front()->get_name();
    rc.format = format;
    if (!config.empty()) rc.config_path = config;
    if (horizon > 0) rc.horizon = horizon;
    if (!radius.empty()) rc.radius = radius;
    if (!out.empty()) rc.out = out;

    json& ov = rc.overrides;
    if (!theta_anchor.empty()) ov["generators"]["theta"] = protorus::cli::parse_anchor_flag(theta_anchor);
    if (no_independence) ov["independent"] = false;
    if (!family.empty()) {
      ov["system"]["family"] = family;
      ov["system"][family == "ax7" ? "theta0" : "theta"] = "theta";
      if (N) ov["system"]["N"] = N;
    }
    if (!pair.empty()) ov["pair"] = json::array({protorus::cli::parse_pair_member(pair[0]), protorus::cli::parse_pair_member(pair[1])});
    if (!multiplier.empty()) {
      ov["multiplier"]["kind"] = multiplier;
      if (N) ov["multiplier"]["N"] = N;
    }
    if (depth > 0) ov["depth"] = depth;
    if (cut >= 0) ov["cut"] = cut;
    if (no_cut) ov["cut"] = nullptr;
    if (!shift.empty()) {
      json s = json::array();
      std::stringstream ss(shift);
      for (std::string tok; std::getline(ss, tok, ',');) s.push_back(tok);
      ov["shift"] = s;
    }
  } catch (const protorus::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return protorus::cli::Failure;
  }

  auto res = protorus::cli::run(rc);
  if (res.exit_code == protorus::cli::Failure) {
    std::cerr << "error: " << res.error << "\n";
    return res.exit_code;
  }
  if (!rc.out) std::cout << res.output;
  return res.exit_code;
}
