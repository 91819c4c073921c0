#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "families.hpp"
#include "homk.hpp"
#include "prolimit.hpp"
#include "spectral.hpp"
#include "torus.hpp"

namespace protorus::io {

using json = nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Reading

inline std::string scalar_text(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorCode::ConfigParse, where + ": expected a string or integer");
}

// unicode spellings used on the command line
inline std::string normalize_symbols(std::string s) {
  auto replace_all = [&](const std::string& from, const std::string& to) {
    for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
  };
  replace_all("\xce\xb8", "theta");  // θ
  replace_all("\xce\xb1", "alpha");  // α
  replace_all("\xce\xb2", "beta");   // β
  replace_all("\xe2\x82\x80", "0");  // ₀
  return s;
}

inline SymbolicScalar read_scalar(const json& j, const std::string& where) {
  try {
    return SymbolicScalar::parse(normalize_symbols(scalar_text(j, where)));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, where + ": " + e.detail());
  }
}

inline Rational read_rational(const json& j, const std::string& where) {
  try {
    return parse_rational(scalar_text(j, where));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, where + ": " + e.detail());
  }
}

inline long read_long(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_string()) {
    try {
      return std::stol(j.get<std::string>());
    } catch (...) {
    }
  }
  throw Error(ErrorCode::ConfigParse, where + ": expected an integer");
}

inline IntMatrix read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ConfigParse, where + ": expected a nonempty array of rows");
  std::size_t c = j[0].is_array() ? j[0].size() : 0;
  IntMatrix m(j.size(), c);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != c) throw Error(ErrorCode::ConfigParse, where + ": ragged row " + std::to_string(r + 1));
    for (std::size_t k = 0; k < c; ++k) {
      Rational q = read_rational(j[r][k], where);
      if (den_of(q) != 1) throw Error(ErrorCode::ConfigParse, where + ": entries must be integers");
      m(r, k) = num_of(q);
    }
  }
  return m;
}

// {"size": m, "upper": [[j, k, value], ...]} with 1-based j < k
inline SkewForm read_form(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("size")) throw Error(ErrorCode::ConfigParse, where + ": form needs 'size'");
  long m = read_long(j["size"], where + ".size");
  if (m < 1) throw Error(ErrorCode::ConfigParse, where + ".size must be positive");
  SkewForm f(static_cast<unsigned>(m));
  if (j.contains("upper"))
    for (auto& e : j["upper"]) {
      if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::ConfigParse, where + ".upper: entries are [j, k, value]");
      long a = read_long(e[0], where + ".upper"), b = read_long(e[1], where + ".upper");
      if (a < 1 || b > m || a >= b) throw Error(ErrorCode::ConfigParse, where + ".upper: need 1 <= j < k <= size");
      f.set(static_cast<unsigned>(a - 1), static_cast<unsigned>(b - 1), read_scalar(e[2], where + ".upper"));
    }
  return f;
}

inline GeneratorEnv read_env(const json& cfg) {
  GeneratorEnv env;
  if (cfg.contains("generators")) {
    for (auto& [name, g] : cfg["generators"].items()) {
      std::string where = "generators." + name;
      if (g.contains("anchor")) {
        Rational mid = read_rational(g["anchor"], where + ".anchor");
        Rational rad = g.contains("radius") ? read_rational(g["radius"], where + ".radius") : Rational(0);
        env.declare(name, Anchor::fixed(mid, rad));
      } else if (g.contains("root")) {
        std::vector<Rational> poly;
        for (auto& c : g["root"]) poly.push_back(read_rational(c, where + ".root"));
        if (!g.contains("bracket") || g["bracket"].size() != 2) throw Error(ErrorCode::ConfigParse, where + ": root needs a bracket [lo, hi]");
        env.declare(name, Anchor::algebraic(poly, read_rational(g["bracket"][0], where), read_rational(g["bracket"][1], where)));
      } else {
        throw Error(ErrorCode::MissingAnchor, where + ": anchor required");
      }
    }
  }
  if (cfg.contains("independent")) env.set_independence(cfg["independent"].get<bool>());
  return env;
}

inline FamilyTag read_family(const json& s) {
  std::string fam = s.at("family").get<std::string>();
  auto N = [&] { return s.contains("N") ? read_long(s["N"], "system.N") : 2L; };
  if (fam == "solenoid") return FamilyTag::solenoid(read_scalar(s.at("theta"), "system.theta"), N());
  if (fam == "ax7") return FamilyTag::ax7(N(), read_scalar(s.contains("theta0") ? s["theta0"] : s.at("theta"), "system.theta0"));
  if (fam == "stable-corner") return FamilyTag::stable_corner(read_form(s.at("form"), "system.form"));
  if (fam == "dimension-changing") {
    std::vector<SymbolicScalar> ts;
    for (auto& t : s.at("thetas")) ts.push_back(read_scalar(t, "system.thetas"));
    return FamilyTag::dim_changing(ts);
  }
  if (fam == "k1-engine") {
    std::vector<IntMatrix> P;
    for (auto& p : s.at("P")) P.push_back(read_matrix(p, "system.P"));
    return FamilyTag::k1_engine(read_scalar(s.at("theta"), "system.theta"), P);
  }
  if (fam == "infinitesimal-killing")
    return FamilyTag::infinitesimal_killing(read_scalar(s.at("alpha"), "system.alpha"), read_scalar(s.at("beta"), "system.beta"));
  throw Error(ErrorCode::ConfigParse, "system.family: unknown family '" + fam + "'");
}

inline TorusDescriptor read_stage(const json& j, const std::string& where) {
  TorusDescriptor d{read_form(j.at("form"), where + ".form"), 1};
  if (j.contains("amplification")) {
    Rational a = read_rational(j["amplification"], where + ".amplification");
    if (den_of(a) != 1 || a < 1) throw Error(ErrorCode::ConfigParse, where + ".amplification must be a positive integer");
    d.amplification = num_of(a);
  }
  return d;
}

inline ConnectingMapSpec read_map_spec(const json& j, const TorusDescriptor& src, const TorusDescriptor& tgt, const std::string& where) {
  ConnectingMapSpec s;
  s.kind = parse_map_case(j.at("kind").get<std::string>());
  s.source = src;
  s.target = tgt;
  if (j.contains("M")) s.M = read_matrix(j["M"], where + ".M");
  if (j.contains("blocks")) s.blocks = num_of(read_rational(j["blocks"], where + ".blocks"));
  if (j.contains("corner_trace")) s.corner_trace = read_scalar(j["corner_trace"], where + ".corner_trace");
  if (j.contains("beta0")) s.beta0 = read_matrix(j["beta0"], where + ".beta0");
  if (j.contains("beta1")) s.beta1 = read_matrix(j["beta1"], where + ".beta1");
  if (j.contains("kappa0")) s.kappa0 = read_matrix(j["kappa0"], where + ".kappa0");
  if (j.contains("kappa1")) s.kappa1 = read_matrix(j["kappa1"], where + ".kappa1");
  if (j.contains("t")) s.t = read_scalar(j["t"], where + ".t");
  return s;
}

inline ProtoralSystem read_system(const json& s, const GeneratorEnv& env) {
  if (s.contains("family")) return build_family(read_family(s), env);
  if (!s.contains("stages")) throw Error(ErrorCode::ConfigParse, "system: needs 'family' or 'stages'");
  std::vector<TorusDescriptor> stages;
  for (std::size_t i = 0; i < s["stages"].size(); ++i) stages.push_back(read_stage(s["stages"][i], "system.stages[" + std::to_string(i) + "]"));
  std::vector<ConnectingMap> maps;
  if (s.contains("maps"))
    for (std::size_t i = 0; i < s["maps"].size() && i + 1 < stages.size(); ++i) {
      std::string w = "system.maps[" + std::to_string(i) + "]";
      maps.push_back(build_connecting_map(read_map_spec(s["maps"][i], stages[i], stages[i + 1], w), env));
    }
  long first = s.contains("first") ? read_long(s["first"], "system.first") : 1;
  std::string name = s.contains("name") ? s["name"].get<std::string>() : "explicit";
  return explicit_system(name, stages, maps, env, first);
}

inline std::vector<std::vector<double>> read_real_matrix(const json& j, const std::string& where) {
  std::vector<std::vector<double>> L;
  for (auto& row : j) {
    L.emplace_back();
    for (auto& v : row) L.back().push_back(to_double(read_rational(v, where)));
  }
  return L;
}

inline FourierMultiplier read_multiplier(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "flat") {
    if (j.contains("L")) return make_flat(read_real_matrix(j["L"], "multiplier.L"));
    return make_flat_identity(j.contains("d") ? static_cast<std::size_t>(read_long(j["d"], "multiplier.d")) : 2);
  }
  if (kind == "flat-stage")
    return make_flat_stage(read_long(j.at("N"), "multiplier.N"), read_long(j.at("n"), "multiplier.n"),
                           j.contains("rescale") ? j["rescale"].get<bool>() : true);
  if (kind == "flat-limit") return make_flat_limit(read_long(j.at("N"), "multiplier.N"));
  if (kind == "length") {
    std::vector<double> w;
    for (auto& v : j.at("weights")) w.push_back(to_double(read_rational(v, "multiplier.weights")));
    std::string norm = j.contains("norm") ? j["norm"].get<std::string>() : "euclidean";
    return make_length(w, norm == "l1" ? LengthNorm::L1 : LengthNorm::Euclidean);
  }
  if (kind == "length-N") {
    long N = read_long(j.at("N"), "multiplier.N");
    if (j.contains("n")) return make_length_N_stage(N, read_long(j["n"], "multiplier.n"));
    return make_length_N(N);
  }
  if (kind == "weighted-omega") {
    std::string w = j.contains("weights") ? j["weights"].get<std::string>() : "linear";
    if (w != "linear") throw Error(ErrorCode::NonProperWeights, "multiplier.weights: only 'linear' is declared proper");
    return make_weighted_omega(linear_omega_weights());
  }
  if (kind == "stable-corner-square") return make_stable_corner_square(j.contains("m") ? read_long(j["m"], "multiplier.m") : 2);
  if (kind == "perturbed") {
    FourierMultiplier base = read_multiplier(j.at("base"));
    double c = to_double(read_rational(j.at("shift"), "multiplier.shift"));
    std::size_t dim = base.fiber_dim;
    return make_perturbed(base, [c, dim](const Label&) { return HermitianMatrix::scalar(c, dim); }, std::abs(c));
  }
  throw Error(ErrorCode::ConfigParse, "multiplier.kind: unknown kind '" + kind + "'");
}

inline Label read_label(const json& j, const std::string& where) {
  Label l;
  for (auto& v : j) l.x.push_back(read_rational(v, where));
  return l;
}

// ---------------------------------------------------------------------------
// Writing

inline json to_json(const SymbolicScalar& s) { return s.str(); }
inline json to_json(const Rational& q) { return to_string(q); }
inline json to_json(const Integer& z) { return z.str(); }

inline json to_json(const IntVector& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(x.str());
  return a;
}

inline json to_json(const IntMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    a.push_back(row);
  }
  return a;
}

inline json to_json(const SkewForm& f) {
  json up = json::array();
  for (unsigned j = 0; j < f.size(); ++j)
    for (unsigned k = j + 1; k < f.size(); ++k)
      if (!f.at(j, k).is_zero()) up.push_back({j + 1, k + 1, f.at(j, k).str()});
  return {{"size", f.size()}, {"upper", up}};
}

inline json to_json(const ConnectingMap& c) {
  return {{"kind", map_case_name(c.kind)}, {"K0", to_json(c.k0)}, {"K1", to_json(c.k1)}, {"t", to_json(c.t)}, {"blocks", to_json(c.blocks)}};
}

inline json to_json(const InvariantReport& r) {
  json stages = json::array();
  for (auto& s : r.stages) {
    json js = {{"n", s.n},
               {"rank", s.m},
               {"amplification", to_json(s.amplification)},
               {"K0_rank", s.k0_rank},
               {"K1_rank", s.k1_rank},
               {"nondegenerate", s.nondegenerate},
               {"c", to_json(s.c)},
               {"unit_trace", to_json(s.unit_trace)}};
    json tr = json::array();
    for (auto& t : s.basis_traces) tr.push_back(to_json(t));
    js["basis_traces"] = tr;
    if (s.map) js["map"] = to_json(*s.map);
    stages.push_back(js);
  }
  json range = json::array();
  for (auto& t : r.trace_range) range.push_back(to_json(t));
  json out = {{"system", r.system},
              {"first", r.first},
              {"horizon", r.horizon},
              {"stages", stages},
              {"scale", {{"kind", scale_name(r.scale.kind)}, {"value", to_json(r.scale.value)}, {"reason", r.scale.reason}}},
              {"trace_range", range},
              {"monotone_scale", r.monotone_scale}};
  if (r.family)
    out["family"] = {{"tag", r.family->tag}, {"K0", r.family->k0_group}, {"K1", r.family->k1_group}, {"trace", r.family->trace_formula}};
  return out;
}

inline json to_json(const Label& l) { return l.str(); }

}  // namespace protorus::io
