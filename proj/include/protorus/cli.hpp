#pragma once

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"

namespace protorus::cli {

using json = nlohmann::json;

inline constexpr const char* kToolName = "protorus";
inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"check-hom", "invariant", "classify", "spectrum", "commutator", "cutdown", "report"};
  return c;
}

enum ExitCode { Success = 0, Failure = 1, Undecided = 2 };

struct RunConfig {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<long> horizon;
  std::optional<std::string> radius;
  std::string format = "json";
  std::optional<std::string> out;
  json overrides = json::object();  // merged over the file contents
};

struct RunResult {
  int exit_code = Success;
  std::string output;  // rendered report
  std::string error;   // diagnostic for exit code 1
};

// ---------------------------------------------------------------------------
// Parsing helpers for convenience flags

// "0.618/1e-6" -> {"anchor": "0.618", "radius": "1e-6"}
inline json parse_anchor_flag(const std::string& s) {
  auto p = s.find('/');
  if (p == std::string::npos) return {{"anchor", s}, {"radius", "0"}};
  return {{"anchor", s.substr(0, p)}, {"radius", s.substr(p + 1)}};
}

// "solenoid(theta,2)" or "ax7(2,theta0)"
inline json parse_pair_member(const std::string& raw) {
  std::string s = io::normalize_symbols(raw);
  std::smatch m;
  static const std::regex re(R"(^\s*([A-Za-z0-9_-]+)\s*\((.*)\)\s*$)");
  if (!std::regex_match(s, m, re)) throw Error(ErrorCode::ConfigParse, "pair member '" + raw + "' must look like family(arg,arg)");
  std::string fam = m[1], args = m[2];
  auto comma = args.rfind(',');
  if (fam == "ax7") comma = args.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ConfigParse, "pair member '" + raw + "' needs two arguments");
  std::string a = args.substr(0, comma), b = args.substr(comma + 1);
  auto trim = [](std::string x) {
    x.erase(0, x.find_first_not_of(' '));
    x.erase(x.find_last_not_of(' ') + 1);
    return x;
  };
  a = trim(a);
  b = trim(b);
  if (fam == "solenoid") return {{"family", "solenoid"}, {"theta", a}, {"N", std::stol(b)}};
  if (fam == "ax7") return {{"family", "ax7"}, {"N", std::stol(a)}, {"theta0", b}};
  throw Error(ErrorCode::ConfigParse, "pair member '" + raw + "': only solenoid and ax7 pairs are classified");
}

// rational, optionally followed by "pi" ("8pi", "2*pi")
inline double parse_radius(const std::string& s) {
  std::string t = s;
  double factor = 1;
  if (t.size() >= 2 && t.substr(t.size() - 2) == "pi") {
    factor = std::numbers::pi;
    t = t.substr(0, t.size() - 2);
    if (!t.empty() && t.back() == '*') t.pop_back();
    if (t.empty()) t = "1";
  }
  double v = to_double(parse_rational(t)) * factor;
  if (!(v > 0)) throw Error(ErrorCode::ConfigParse, "radius must be positive");
  return v;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void collect_N(const json& j, const std::string& where, std::vector<std::string>& errs) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) {
      if (k == "N" && (v.is_number_integer() || v.is_string())) {
        long n = 0;
        try {
          n = io::read_long(v, where + ".N");
        } catch (const Error& e) {
          errs.push_back(e.detail());
          continue;
        }
        if (n < 2 && std::find(errs.begin(), errs.end(), "N must be \xe2\x89\xa5 2") == errs.end()) errs.push_back("N must be \xe2\x89\xa5 2");
      } else {
        collect_N(v, where.empty() ? k : where + "." + k, errs);
      }
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) collect_N(j[i], where + "[" + std::to_string(i) + "]", errs);
  }
}

inline std::string describe(const Error& e) {
  static const std::regex missing(R"(generator '([^']+)' has no anchor)");
  std::smatch m;
  std::string d = e.detail();
  if (e.code() == ErrorCode::MissingAnchor && std::regex_search(d, m, missing)) return "generators." + m[1].str() + ": anchor required";
  if (e.code() == ErrorCode::InvalidParameter && d == "N must be >= 2") return "N must be \xe2\x89\xa5 2";
  return d;
}

}  // namespace detail

struct Validation {
  bool ok = false;
  json normalized;
  std::vector<std::string> errors;
};

inline Validation validate_config(const json& cfg) {
  Validation v;
  auto& errs = v.errors;
  if (!cfg.is_object()) {
    errs.push_back("config must be a JSON object");
    return v;
  }
  if (cfg.contains("command")) {
    auto c = cfg["command"].is_string() ? cfg["command"].get<std::string>() : "";
    if (std::find(commands().begin(), commands().end(), c) == commands().end()) errs.push_back("command: unknown command '" + c + "'");
  }
  if (cfg.contains("generators")) {
    if (!cfg["generators"].is_object()) errs.push_back("generators: expected an object");
    else
      for (auto& [name, g] : cfg["generators"].items())
        if (!g.is_object() || (!g.contains("anchor") && !g.contains("root"))) errs.push_back("generators." + name + ": anchor required");
  }
  if (cfg.contains("horizon")) {
    if (!cfg["horizon"].is_number_integer() || cfg["horizon"].get<long>() <= 0) errs.push_back("horizon must be a positive integer");
  }
  if (cfg.contains("radius")) {
    try {
      parse_radius(io::scalar_text(cfg["radius"], "radius"));
    } catch (const Error& e) {
      errs.push_back("radius must be positive");
    }
  }
  if (cfg.contains("format")) {
    auto f = cfg["format"].get<std::string>();
    if (f != "json" && f != "table" && f != "csv") errs.push_back("format must be json, table or csv");
  }
  detail::collect_N(cfg, "", errs);
  if (errs.empty()) {
    try {
      GeneratorEnv env = io::read_env(cfg);
      if (cfg.contains("system")) io::read_system(cfg["system"], env);
      if (cfg.contains("pair"))
        for (auto& p : cfg["pair"]) io::read_family(p);
      if (cfg.contains("multiplier")) io::read_multiplier(cfg["multiplier"]);
      if (cfg.contains("query") && cfg["query"].contains("sign")) require_anchors(io::read_scalar(cfg["query"]["sign"], "query.sign"), env);
    } catch (const Error& e) {
      errs.push_back(detail::describe(e));
    } catch (const json::exception& e) {
      errs.push_back(std::string("schema: ") + e.what());
    }
  }
  v.ok = errs.empty();
  if (v.ok) v.normalized = cfg;
  return v;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, path + ": " + e.what());
  }
}

inline Validation validate_config_file(const std::string& path) {
  try {
    return validate_config(load_json_file(path));
  } catch (const Error& e) {
    Validation v;
    v.errors.push_back(e.detail());
    return v;
  }
}

// ---------------------------------------------------------------------------
// Commands

struct Outcome {
  json result = json::object();
  std::string verdict;
  int exit_code = Success;
  std::vector<std::pair<std::string, double>> csv_rows;  // spectral output
};

namespace detail {

inline long horizon_of(const json& cfg, const ProtoralSystem& sys) {
  return cfg.contains("horizon") ? cfg["horizon"].get<long>() : sys.default_horizon();
}

inline double radius_of(const json& cfg, double fallback) {
  return cfg.contains("radius") ? parse_radius(io::scalar_text(cfg["radius"], "radius")) : fallback;
}

inline LimitElement read_element(const json& j, const ProtoralSystem& sys) {
  LimitElement x;
  x.stage = j.contains("stage") ? io::read_long(j["stage"], "stage") : sys.first_stage();
  x.parity = j.contains("parity") && j["parity"] == "odd" ? Parity::Odd : Parity::Even;
  for (auto& c : j.at("class")) x.coords.push_back(num_of(io::read_rational(c, "class")));
  std::size_t want = x.parity == Parity::Even ? sys.stage(x.stage).k0_rank() : sys.stage(x.stage).k1_rank();
  if (x.coords.size() != want) throw Error(ErrorCode::DimensionMismatch, "class must have " + std::to_string(want) + " coordinates");
  return x;
}

inline Outcome cmd_check_hom(const json& cfg) {
  Outcome o;
  GeneratorEnv env = io::read_env(cfg);
  bool any = false;
  if (cfg.contains("query") && cfg["query"].contains("sign")) {
    any = true;
    SymbolicScalar e = io::read_scalar(cfg["query"]["sign"], "query.sign");
    Sign s = scalar_sign(e, env);
    o.result["sign"] = {{"expression", e.str()}, {"sign", sign_name(s)}};
    o.verdict = sign_name(s);
    if (s == Sign::Undecided) o.exit_code = Undecided;
  }
  if (cfg.contains("hom")) {
    any = true;
    const json& h = cfg["hom"];
    SkewForm theta = io::read_form(h.at("theta"), "hom.theta"), psi = io::read_form(h.at("psi"), "hom.psi");
    json r;
    if (h.contains("M")) {
      IntMatrix M = io::read_matrix(h["M"], "hom.M");
      auto c = check_congruence(theta, psi, M);
      r["congruence"] = {{"holds", c.holds}, {"message", c.message}};
      if (c.holds) {
        auto [k0, k1] = induced_k_maps(M);
        r["K0"] = io::to_json(k0);
        r["K1"] = io::to_json(k1);
        auto u = check_unital_existence(k0, theta, psi);
        r["unital"] = unital_name(u.kind);
      }
      o.verdict = c.holds ? "Congruent" : "NotCongruent";
    } else {
      IntMatrix k0 = io::read_matrix(h.at("k0"), "hom.k0");
      if (h.contains("k")) {
        IntMatrix k1 = h.contains("k1") ? io::read_matrix(h["k1"], "hom.k1") : IntMatrix(1, 1);
        auto n = check_nonunital_existence(k0, k1, theta, psi, num_of(io::read_rational(h["k"], "hom.k")), env);
        r["nonunital"] = {{"kind", nonunital_name(n.kind)},
                          {"eta", io::to_json(n.eta)},
                          {"trace", io::to_json(n.t)},
                          {"boundary", n.boundary}};
        if (n.kind == NonunitalExistence::FailTrace) r["nonunital"]["difference"] = io::to_json(n.difference);
        o.verdict = nonunital_name(n.kind);
      } else {
        auto u = check_unital_existence(k0, theta, psi);
        r["unital"] = {{"kind", unital_name(u.kind)}, {"unit_image", io::to_json(u.unit_image)}};
        if (u.kind == UnitalExistence::FailTrace) r["unital"]["difference"] = io::to_json(u.difference);
        o.verdict = unital_name(u.kind);
      }
    }
    o.result["hom"] = r;
  }
  if (cfg.contains("system")) {
    any = true;
    ProtoralSystem sys = io::read_system(cfg["system"], env);
    long end = sys.final_stage(horizon_of(cfg, sys));
    json maps = json::array();
    for (long n = sys.first_stage(); n < end; ++n) {
      json m = io::to_json(sys.map(n));
      m["from"] = n;
      maps.push_back(m);
    }
    o.result["maps"] = maps;
    if (o.verdict.empty()) o.verdict = "Valid";
  }
  if (!any) throw Error(ErrorCode::ConfigParse, "check-hom needs 'hom', 'system' or 'query'");
  return o;
}

inline Outcome cmd_invariant(const json& cfg) {
  Outcome o;
  GeneratorEnv env = io::read_env(cfg);
  if (!cfg.contains("system")) throw Error(ErrorCode::ConfigParse, "invariant needs 'system'");
  ProtoralSystem sys = io::read_system(cfg["system"], env);
  long h = horizon_of(cfg, sys);
  InvariantReport rep = elliott_report(sys, env, h);
  o.result = io::to_json(rep);
  o.verdict = scale_name(rep.scale.kind);
  if (rep.scale.kind == ScaleReport::UnknownAtHorizon) o.exit_code = Undecided;
  if (cfg.contains("members")) {
    json ms = json::array();
    for (auto& m : cfg["members"]) {
      auto r = projection_scale_member(read_element(m, sys), sys, env, h);
      ms.push_back({{"kind", membership_name(r.kind)}, {"stage", r.stage}, {"reason", r.reason}});
      if (r.kind == ScaleMembership::UnknownAtHorizon) o.exit_code = Undecided;
    }
    o.result["members"] = ms;
  }
  if (cfg.contains("divisibility")) {
    const json& d = cfg["divisibility"];
    auto r = divisibility_probe(read_element(d, sys), num_of(io::read_rational(d.at("p"), "divisibility.p")),
                                d.contains("depth") ? io::read_long(d["depth"], "divisibility.depth") : 8, sys, h);
    o.result["divisibility"] = {{"divisible", r.divisible}, {"obstructed_at", r.obstructed_at}, {"stages", r.stages}};
  }
  return o;
}

inline Outcome cmd_classify(const json& cfg) {
  Outcome o;
  if (!cfg.contains("pair") || cfg["pair"].size() != 2) throw Error(ErrorCode::ConfigParse, "classify needs a 'pair' of two systems");
  GeneratorEnv env = io::read_env(cfg);
  FamilyTag a = io::read_family(cfg["pair"][0]), b = io::read_family(cfg["pair"][1]);
  Classification c;
  if (a.kind == FamilyTag::Solenoid && b.kind == FamilyTag::Solenoid) {
    c = classify_solenoid_pair(a.theta, a.N, b.theta, b.N, env);
    if (c.kind == Classification::Isomorphic) o.result["u"] = io::to_json(c.u);
  } else if (a.kind == FamilyTag::AX7 && b.kind == FamilyTag::AX7) {
    c = classify_ax7_pair(a.N, a.theta, b.N, b.theta, env);
    if (c.kind == Classification::Isomorphic)
      o.result["witness"] = {{"epsilon", c.epsilon}, {"v", io::to_json(c.v)}, {"u", io::to_json(c.u)}, {"lambda", io::to_json(c.lambda)}};
  } else {
    throw Error(ErrorCode::InvalidParameter, "classification covers solenoid/solenoid and ax7/ax7 pairs");
  }
  o.result["kind"] = classification_name(c.kind);
  o.result["obstruction"] = c.obstruction;
  o.verdict = classification_name(c.kind);
  if (c.kind == Classification::UnknownAtBound) o.exit_code = Undecided;
  return o;
}

inline Outcome cmd_spectrum(const json& cfg) {
  Outcome o;
  if (!cfg.contains("multiplier")) throw Error(ErrorCode::ConfigParse, "spectrum needs 'multiplier'");
  FourierMultiplier F = io::read_multiplier(cfg["multiplier"]);
  o.result["multiplier"] = F.description;
  if (F.family == FourierMultiplier::Family::FlatLimit) {
    long depth = cfg.contains("depth") ? cfg["depth"].get<long>() : 10;
    auto d = resolvent_diagnostic(F, {}, depth);
    json w = json::array();
    for (std::size_t i = 0; i < d.witness.size(); ++i) {
      w.push_back({{"label", io::to_json(d.witness[i])}, {"eigenvalue", io::fmt_double(d.eigenvalues[i])}});
      o.csv_rows.emplace_back(d.witness[i].str(), d.eigenvalues[i]);
    }
    o.result["witness"] = w;
    o.verdict = "NonCompactWitness";
    return o;
  }
  double R = radius_of(cfg, 1.0);
  o.result["radius"] = io::fmt_double(R);
  auto count = finite_multiplicity_check(F, R);
  o.result["count"] = count.count;
  o.result["ball"] = multiplicity_name(count.kind);
  o.verdict = multiplicity_name(count.kind);
  if (count.kind == MultiplicityResult::CertifiedFinite) {
    json sp = json::array();
    for (auto& e : spectrum_enumerate(F, R)) {
      sp.push_back({{"label", io::to_json(e.label)}, {"eigenvalue", io::fmt_double(e.eigenvalue)}});
      o.csv_rows.emplace_back(e.label.str(), e.eigenvalue);
    }
    o.result["spectrum"] = sp;
  }
  if (cfg.contains("radii")) {
    std::vector<double> radii;
    for (auto& r : cfg["radii"]) radii.push_back(parse_radius(io::scalar_text(r, "radii")));
    auto d = resolvent_diagnostic(F, radii);
    json c = json::array();
    for (std::size_t i = 0; i < d.radii.size(); ++i) c.push_back({{"radius", io::fmt_double(d.radii[i])}, {"count", d.counts[i]}});
    o.result["resolvent"] = {{"kind", "CompactEvidence"}, {"counts", c}};
  }
  return o;
}

inline Outcome cmd_commutator(const json& cfg) {
  Outcome o;
  if (!cfg.contains("multiplier")) throw Error(ErrorCode::ConfigParse, "commutator needs 'multiplier'");
  FourierMultiplier F = io::read_multiplier(cfg["multiplier"]);
  Label a = cfg.contains("shift") ? io::read_label(cfg["shift"], "shift") : Label::lattice({1, 0});
  double sample = radius_of(cfg, 4.0);
  auto ib = increment_bound(F, a);
  auto c = monomial_commutator_norm(F, a, sample);
  o.result = {{"multiplier", F.description},
              {"shift", io::to_json(a)},
              {"increment", io::fmt_double(ib.value)},
              {"upper", io::fmt_double(c.upper)},
              {"lower", io::fmt_double(c.lower)},
              {"exact", c.exact},
              {"sample_radius", io::fmt_double(c.sample_radius)}};
  o.verdict = c.exact ? "Exact" : "Bounded";
  return o;
}

inline Outcome cmd_cutdown(const json& cfg) {
  Outcome o;
  if (!cfg.contains("multiplier")) throw Error(ErrorCode::ConfigParse, "cutdown needs 'multiplier'");
  FourierMultiplier F = io::read_multiplier(cfg["multiplier"]);
  std::optional<long> cut;
  if (cfg.contains("cut") && !cfg["cut"].is_null()) cut = io::read_long(cfg["cut"], "cut");
  double R = radius_of(cfg, 2.0);
  auto r = cutdown_count(F, cut, R);
  o.result = {{"multiplier", F.description}, {"radius", io::fmt_double(R)}, {"kind", r.kind == CutdownResult::Finite ? "Finite" : "Unbounded"}};
  if (r.kind == CutdownResult::Finite) o.result["count"] = r.count;
  else o.result["witness"] = r.witness;
  o.verdict = r.kind == CutdownResult::Finite ? "Finite" : "Unbounded";
  return o;
}

inline Outcome dispatch(const std::string& command, const json& cfg);

inline Outcome cmd_report(const json& cfg) {
  Outcome o;
  o.verdict = "Report";
  auto merge = [&](const std::string& name, const Outcome& sub) {
    o.result[name] = {{"verdict", sub.verdict}, {"result", sub.result}};
    o.exit_code = std::max(o.exit_code, sub.exit_code);
    for (auto& r : sub.csv_rows) o.csv_rows.push_back(r);
  };
  if (cfg.contains("system")) merge("invariant", cmd_invariant(cfg));
  if (cfg.contains("pair")) merge("classify", cmd_classify(cfg));
  if (cfg.contains("multiplier")) merge("spectrum", cmd_spectrum(cfg));
  if (cfg.contains("hom") || cfg.contains("query")) merge("check-hom", cmd_check_hom(cfg));
  if (o.result.empty()) throw Error(ErrorCode::ConfigParse, "report found nothing to compute");
  return o;
}

inline Outcome dispatch(const std::string& command, const json& cfg) {
  if (command == "check-hom") return cmd_check_hom(cfg);
  if (command == "invariant") return cmd_invariant(cfg);
  if (command == "classify") return cmd_classify(cfg);
  if (command == "spectrum") return cmd_spectrum(cfg);
  if (command == "commutator") return cmd_commutator(cfg);
  if (command == "cutdown") return cmd_cutdown(cfg);
  if (command == "report") return cmd_report(cfg);
  throw Error(ErrorCode::ConfigParse, "unknown command '" + command + "'");
}

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    bool scalar = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
    if (scalar) {
      std::string s = "[";
      for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + (j[i].is_string() ? j[i].get<std::string>() : j[i].dump());
      out.emplace_back(prefix, s + "]");
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else {
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

inline json resolve_config(const RunConfig& rc) {
  json cfg = rc.config_path ? load_json_file(*rc.config_path) : json::object();
  if (!cfg.is_object()) throw Error(ErrorCode::ConfigParse, "config must be a JSON object");
  cfg.merge_patch(rc.overrides);
  if (!rc.command.empty()) cfg["command"] = rc.command;
  if (rc.horizon) {
    if (*rc.horizon <= 0) throw Error(ErrorCode::ConfigParse, "horizon must be a positive integer");
    cfg["horizon"] = *rc.horizon;
  }
  if (rc.radius) cfg["radius"] = *rc.radius;
  cfg["format"] = rc.format;
  return cfg;
}

inline std::string render(const json& cfg, const Outcome& o, const std::string& format) {
  json report = {{"tool", kToolName},
                 {"version", kVersion},
                 {"command", cfg.value("command", "")},
                 {"config", cfg},
                 {"verdict", o.verdict},
                 {"exit_code", o.exit_code},
                 {"result", o.result}};
  if (format == "json") return report.dump(2) + "\n";
  if (format == "csv") {
    std::ostringstream s;
    if (!o.csv_rows.empty()) {
      s << "label,eigenvalue\n";
      auto rows = o.csv_rows;
      std::stable_sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.second < b.second; });
      for (auto& [l, e] : rows) s << detail::csv_field(l) << "," << io::fmt_double(e) << "\n";
    } else {
      std::vector<std::pair<std::string, std::string>> kv;
      detail::flatten(report, "", kv);
      s << "key,value\n";
      for (auto& [k, v] : kv) s << detail::csv_field(k) << "," << detail::csv_field(v) << "\n";
    }
    return s.str();
  }
  std::vector<std::pair<std::string, std::string>> kv;
  detail::flatten(report["result"], "", kv);
  std::size_t w = 7;
  for (auto& [k, v] : kv) w = std::max(w, k.size());
  std::ostringstream s;
  s << kToolName << " " << kVersion << "  " << report["command"].get<std::string>() << "\n";
  s << std::string(w - 7, ' ') << "verdict  " << o.verdict << "\n";
  for (auto& [k, v] : kv) s << std::string(w - k.size(), ' ') << k << "  " << v << "\n";
  return s.str();
}

inline RunResult run(const RunConfig& rc) {
  RunResult res;
  json cfg;
  try {
    cfg = resolve_config(rc);
    if (rc.format != "json" && rc.format != "table" && rc.format != "csv")
      throw Error(ErrorCode::ConfigParse, "format must be json, table or csv");
    Validation v = validate_config(cfg);
    if (!v.ok) {
      std::string msg;
      for (auto& e : v.errors) msg += (msg.empty() ? "" : "\n") + e;
      throw Error(ErrorCode::ConfigParse, msg);
    }
    std::string command = cfg.value("command", "");
    Outcome o;
    try {
      o = detail::dispatch(command, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UndecidedSign) throw;
      o.verdict = "Undecided";
      o.exit_code = Undecided;
      o.result = {{"undecided", e.detail()}};
    }
    res.exit_code = o.exit_code;
    res.output = render(cfg, o, rc.format);
  } catch (const Error& e) {
    res.exit_code = Failure;
    res.error = std::string(error_name(e.code())) + ": " + e.detail();
    return res;
  } catch (const json::exception& e) {
    res.exit_code = Failure;
    res.error = std::string("ConfigParse: ") + e.what();
    return res;
  }
  if (rc.out) {
    std::ofstream f(*rc.out, std::ios::binary);
    if (!f) {
      res.exit_code = Failure;
      res.error = "cannot write '" + *rc.out + "'";
      return res;
    }
    f << res.output;
  }
  return res;
}

}  // namespace protorus::cli
