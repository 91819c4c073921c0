#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "exact.hpp"
#include "homk.hpp"
#include "intlat.hpp"
#include "torus.hpp"

namespace protorus {

// Family-supplied facts that cannot be read off a finite horizon.
struct ScaleCertificate {
  enum Kind { None, Unital, GeometricInfinite, FiniteLimit } kind = None;
  SymbolicScalar limit;  // FiniteLimit: sup of the unit traces
  std::string reason;
};

struct FamilyData {
  std::string tag;
  ScaleCertificate scale;
  std::string k0_group, k1_group;
  std::string trace_formula;
};

class ProtoralSystem {
 public:
  using StageFn = std::function<TorusDescriptor(long)>;
  using MapFn = std::function<ConnectingMap(long)>;  // map from stage n into n + 1

  static constexpr long kDefaultHorizon = 32;

  ProtoralSystem(std::string name, long first, std::optional<long> last, StageFn stage, MapFn map, GeneratorEnv env)
      : name_(std::move(name)), first_(first), last_(last), cache_(std::make_shared<Cache>()) {
    cache_->stage_fn = std::move(stage);
    cache_->map_fn = std::move(map);
    env_ = std::move(env);
  }

  const std::string& name() const { return name_; }
  long first_stage() const { return first_; }
  std::optional<long> last_stage() const { return last_; }
  const GeneratorEnv& env() const { return env_; }
  long default_horizon() const { return horizon_; }
  void set_default_horizon(long h) { horizon_ = h; }

  // last stage reachable with `horizon` maps
  long final_stage(long horizon) const {
    long s = first_ + horizon;
    return last_ ? std::min(*last_, s) : s;
  }

  const std::optional<FamilyData>& family() const { return family_; }
  void set_family(FamilyData f) { family_ = std::move(f); }

  const TorusDescriptor& stage(long n) const {
    check_stage(n);
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->stages.find(n);
    if (it == cache_->stages.end()) it = cache_->stages.emplace(n, cache_->stage_fn(n)).first;
    return it->second;
  }

  const ConnectingMap& map(long n) const {
    check_stage(n);
    if (last_ && n >= *last_) throw Error(ErrorCode::HorizonExceeded, "no map out of the final stage " + std::to_string(n));
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->maps.find(n);
    if (it == cache_->maps.end()) it = cache_->maps.emplace(n, cache_->map_fn(n)).first;
    return it->second;
  }

  // c_first = 1, c_{n+1} = c_n / t_n
  SymbolicScalar scaling_constant(long n) const {
    check_stage(n);
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      if (cache_->c.empty()) cache_->c.push_back(SymbolicScalar(1));
      if (n - first_ < static_cast<long>(cache_->c.size())) return cache_->c[n - first_];
    }
    for (;;) {
      long have;
      SymbolicScalar last;
      {
        std::lock_guard<std::mutex> lock(cache_->mu);
        have = static_cast<long>(cache_->c.size());
        last = cache_->c.back();
      }
      if (n - first_ < have) break;
      SymbolicScalar next = last / map(first_ + have - 1).t;
      std::lock_guard<std::mutex> lock(cache_->mu);
      if (static_cast<long>(cache_->c.size()) == have) cache_->c.push_back(next);
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    return cache_->c[n - first_];
  }

 private:
  struct Cache {
    std::mutex mu;
    StageFn stage_fn;
    MapFn map_fn;
    std::map<long, TorusDescriptor> stages;
    std::map<long, ConnectingMap> maps;
    std::vector<SymbolicScalar> c;
  };

  void check_stage(long n) const {
    if (n < first_ || (last_ && n > *last_))
      throw Error(ErrorCode::HorizonExceeded, "stage " + std::to_string(n) + " outside the system");
  }

  std::string name_;
  long first_;
  std::optional<long> last_;
  long horizon_ = kDefaultHorizon;
  std::shared_ptr<Cache> cache_;
  GeneratorEnv env_;
  std::optional<FamilyData> family_;
};

// Explicit finite system from stage descriptors and the maps between them.
inline ProtoralSystem explicit_system(std::string name, std::vector<TorusDescriptor> stages, std::vector<ConnectingMap> maps,
                                      GeneratorEnv env, long first = 1) {
  if (stages.empty()) throw Error(ErrorCode::InvalidParameter, "system needs at least one stage");
  if (maps.size() + 1 != stages.size()) throw Error(ErrorCode::InvalidParameter, "need exactly one map between consecutive stages");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].source.form != stages[i].form || maps[i].target.form != stages[i + 1].form)
      throw Error(ErrorCode::InvalidParameter, "map " + std::to_string(i) + " does not join adjacent stages");
  }
  auto st = std::make_shared<std::vector<TorusDescriptor>>(std::move(stages));
  auto mp = std::make_shared<std::vector<ConnectingMap>>(std::move(maps));
  long last = first + static_cast<long>(st->size()) - 1;
  return ProtoralSystem(
      std::move(name), first, last, [st, first](long n) { return (*st)[n - first]; },
      [mp, first](long n) { return (*mp)[n - first]; }, std::move(env));
}

// ---------------------------------------------------------------------------
// Limit elements

struct LimitElement {
  long stage = 0;
  Parity parity = Parity::Even;
  IntVector coords;
};

enum class Truth { True, False, Unknown };

inline const char* truth_name(Truth t) {
  switch (t) {
    case Truth::True: return "True";
    case Truth::False: return "False";
    default: return "Unknown";
  }
}

inline const IntMatrix& k_map(const ProtoralSystem& sys, long n, Parity p) {
  const ConnectingMap& c = sys.map(n);
  return p == Parity::Odd ? c.k1 : c.k0;
}

inline LimitElement push_to_stage(const LimitElement& x, long m, const ProtoralSystem& sys) {
  if (m < x.stage) throw Error(ErrorCode::InvalidParameter, "cannot push backwards");
  if (sys.last_stage() && m > *sys.last_stage()) throw Error(ErrorCode::HorizonExceeded, "stage " + std::to_string(m) + " beyond the system");
  if (m - sys.first_stage() > 4096) throw Error(ErrorCode::HorizonExceeded, "stage " + std::to_string(m) + " beyond the hard limit");
  LimitElement y = x;
  for (long n = x.stage; n < m; ++n) {
    y.coords = k_map(sys, n, x.parity).apply(y.coords);
    y.stage = n + 1;
  }
  return y;
}

inline bool rationally_injective(const IntMatrix& m) {
  if (detail::is_monomial_pattern(m)) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      bool any = false;
      for (std::size_t i = 0; i < m.rows() && !any; ++i) any = m(i, j) != 0;
      if (!any) return false;
    }
    return true;
  }
  return integer_kernel_rank(m).rank == m.cols();
}

inline Truth elem_eq(const LimitElement& x, const LimitElement& y, const ProtoralSystem& sys, long horizon = -1) {
  if (x.parity != y.parity) throw Error(ErrorCode::InvalidParameter, "parities differ");
  if (horizon < 0) horizon = sys.default_horizon();
  long s = std::max(x.stage, y.stage);
  long end = sys.final_stage(horizon);
  if (s > end) throw Error(ErrorCode::HorizonExceeded, "elements live beyond the horizon");
  LimitElement a = push_to_stage(x, s, sys), b = push_to_stage(y, s, sys);
  std::vector<bool> injective;
  for (long n = s; n < end; ++n) injective.push_back(rationally_injective(k_map(sys, n, x.parity)));
  bool lossy = false;
  for (;;) {
    if (a.coords == b.coords) return Truth::True;
    if (a.stage == end) break;
    // distinct vectors stay distinct under the remaining injective maps
    if (std::all_of(injective.begin() + (a.stage - s), injective.end(), [](bool v) { return v; }) && !lossy)
      return Truth::False;
    lossy = lossy || !injective[a.stage - s];
    const IntMatrix& f = k_map(sys, a.stage, x.parity);
    a.coords = f.apply(a.coords);
    b.coords = f.apply(b.coords);
    ++a.stage;
    ++b.stage;
  }
  if (sys.last_stage() && end == *sys.last_stage()) return Truth::False;
  return lossy ? Truth::Unknown : Truth::False;
}

struct ScalingSequence {
  long first = 0;
  std::vector<SymbolicScalar> t, c;
};

inline ScalingSequence scaling_constants(const ProtoralSystem& sys, long horizon = -1) {
  if (horizon < 0) horizon = sys.default_horizon();
  ScalingSequence s;
  s.first = sys.first_stage();
  long end = sys.final_stage(horizon);
  for (long n = s.first; n <= end; ++n) {
    s.c.push_back(sys.scaling_constant(n));
    if (n < end) s.t.push_back(sys.map(n).t);
  }
  return s;
}

inline SymbolicScalar limit_trace(const LimitElement& x, const ProtoralSystem& sys) {
  if (x.parity != Parity::Even) throw Error(ErrorCode::InvalidParameter, "trace is defined on K0 only");
  return sys.scaling_constant(x.stage) * trace_of_class(sys.stage(x.stage), x.coords);
}

inline LimitElement unit_element(const ProtoralSystem& sys, long n) {
  return {n, Parity::Even, unit_class(sys.stage(n))};
}

inline LimitElement zero_element(const ProtoralSystem& sys, long n, Parity p = Parity::Even) {
  const TorusDescriptor& d = sys.stage(n);
  return {n, p, IntVector(p == Parity::Odd ? d.k1_rank() : d.k0_rank(), 0)};
}

inline Truth order_leq(const LimitElement& x, const LimitElement& y, const ProtoralSystem& sys, const GeneratorEnv& env,
                       long horizon = -1, int max_refinements = -1) {
  if (x.parity != Parity::Even || y.parity != Parity::Even) throw Error(ErrorCode::InvalidParameter, "K1 carries no order");
  Sign s = scalar_sign(limit_trace(y, sys) - limit_trace(x, sys), env, max_refinements);
  if (s == Sign::Positive) return Truth::True;
  if (s == Sign::Negative) return Truth::False;
  Truth eq = elem_eq(x, y, sys, horizon);
  if (eq == Truth::True) return Truth::True;
  if (s == Sign::Zero && eq == Truth::False) return Truth::False;
  return Truth::Unknown;
}

struct ScaleMembership {
  enum Kind { Member, NotMemberCertified, UnknownAtHorizon } kind = UnknownAtHorizon;
  long stage = 0;
  std::string reason;
};

inline const char* membership_name(ScaleMembership::Kind k) {
  switch (k) {
    case ScaleMembership::Member: return "Member";
    case ScaleMembership::NotMemberCertified: return "NotMemberCertified";
    default: return "UnknownAtHorizon";
  }
}

inline ScaleMembership projection_scale_member(const LimitElement& x, const ProtoralSystem& sys, const GeneratorEnv& env,
                                               long horizon = -1, int max_refinements = -1) {
  if (horizon < 0) horizon = sys.default_horizon();
  Truth pos = order_leq(zero_element(sys, x.stage), x, sys, env, horizon, max_refinements);
  if (pos == Truth::Unknown) throw Error(ErrorCode::UndecidedSign, "positivity of the class undecided");
  if (pos == Truth::False) throw Error(ErrorCode::InvalidParameter, "class is not positive");
  ScaleMembership r;
  long end = sys.final_stage(horizon);
  bool undecided = false;
  for (long m = std::max(x.stage, sys.first_stage()); m <= end; ++m) {
    Truth t = order_leq(x, unit_element(sys, m), sys, env, horizon, max_refinements);
    if (t == Truth::True) {
      r.kind = ScaleMembership::Member;
      r.stage = m;
      return r;
    }
    if (t == Truth::Unknown) undecided = true;
  }
  if (undecided) throw Error(ErrorCode::UndecidedSign, "comparison with a unit class undecided");
  SymbolicScalar rho = limit_trace(x, sys);
  const auto& fam = sys.family();
  if (fam && fam->scale.kind == ScaleCertificate::Unital) {
    r.kind = ScaleMembership::NotMemberCertified;
    r.reason = "unital limit: scale is [0,[1]] and x exceeds [1]";
  } else if (fam && fam->scale.kind == ScaleCertificate::FiniteLimit) {
    Sign s = require_sign(fam->scale.limit - rho, env, max_refinements);
    if (s != Sign::Positive) {
      r.kind = ScaleMembership::NotMemberCertified;
      r.reason = "trace " + rho.str() + " is not below the scale limit " + fam->scale.limit.str();
    } else {
      r.reason = "trace below the scale limit but no unit class dominates within the horizon";
    }
  } else if (sys.last_stage() && end == *sys.last_stage()) {
    r.kind = ScaleMembership::NotMemberCertified;
    r.reason = "finite system: the last unit class does not dominate";
  } else {
    r.reason = "no unit class dominates within the horizon";
  }
  return r;
}

struct ScaleReport {
  enum Kind { Unital, Finite, Infinite, UnknownAtHorizon } kind = UnknownAtHorizon;
  SymbolicScalar value;  // Finite: the limit; UnknownAtHorizon: partial sup
  std::string reason;
};

inline const char* scale_name(ScaleReport::Kind k) {
  switch (k) {
    case ScaleReport::Unital: return "Unital";
    case ScaleReport::Finite: return "Finite";
    case ScaleReport::Infinite: return "Infinite";
    default: return "UnknownAtHorizon";
  }
}

inline ScaleReport scale_classification(const ProtoralSystem& sys, const GeneratorEnv& env, long horizon = -1) {
  if (horizon < 0) horizon = sys.default_horizon();
  (void)env;
  ScaleReport r;
  long end = sys.final_stage(horizon);
  SymbolicScalar sup = limit_trace(unit_element(sys, end), sys);
  if (const auto& fam = sys.family()) {
    switch (fam->scale.kind) {
      case ScaleCertificate::Unital:
        r.kind = ScaleReport::Unital;
        r.value = SymbolicScalar(1);
        r.reason = fam->scale.reason;
        return r;
      case ScaleCertificate::GeometricInfinite:
        r.kind = ScaleReport::Infinite;
        r.reason = fam->scale.reason;
        return r;
      case ScaleCertificate::FiniteLimit:
        r.kind = ScaleReport::Finite;
        r.value = fam->scale.limit;
        r.reason = fam->scale.reason;
        return r;
      default:
        break;
    }
  }
  if (sys.last_stage() && end == *sys.last_stage()) {
    bool unital = true;
    for (long n = sys.first_stage(); n < end; ++n) unital = unital && sys.map(n).t == SymbolicScalar(1);
    r.kind = unital ? ScaleReport::Unital : ScaleReport::Finite;
    r.value = unital ? SymbolicScalar(1) : sup;
    r.reason = "finite system: the limit is the last stage";
    return r;
  }
  r.value = sup;
  r.reason = "no family certificate; value is the unit trace at the horizon";
  return r;
}

struct DivisibilityResult {
  bool divisible = true;
  long obstructed_at = 0;          // first failing power when not divisible
  std::vector<long> stages;        // stage realising p^k | x for k = 1..depth
};

inline DivisibilityResult divisibility_probe(const LimitElement& x, const Integer& p, long depth, const ProtoralSystem& sys,
                                             long horizon = -1) {
  if (p < 2) throw Error(ErrorCode::InvalidParameter, "p must be at least 2");
  if (horizon < 0) horizon = sys.default_horizon();
  long end = sys.final_stage(horizon);
  if (x.stage > end) throw Error(ErrorCode::HorizonExceeded, "element beyond the horizon");
  DivisibilityResult r;
  LimitElement y = x;
  Integer pk = 1;
  for (long k = 1; k <= depth; ++k) {
    pk *= p;
    for (;;) {
      bool ok = std::all_of(y.coords.begin(), y.coords.end(), [&](const Integer& c) { return c % pk == 0; });
      if (ok) break;
      if (y.stage == end) {
        r.divisible = false;
        r.obstructed_at = k;
        return r;
      }
      y = push_to_stage(y, y.stage + 1, sys);
    }
    r.stages.push_back(y.stage);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Invariant report

struct StageSummary {
  long n = 0;
  unsigned m = 0;
  Integer amplification = 1;
  std::size_t k0_rank = 0, k1_rank = 0;
  bool nondegenerate = true;
  SymbolicScalar c, unit_trace;
  std::vector<SymbolicScalar> basis_traces;  // limit traces of the even basis classes
  std::optional<ConnectingMap> map;          // into stage n + 1
};

struct InvariantReport {
  std::string system;
  long first = 0, horizon = 0;
  std::vector<StageSummary> stages;
  ScaleReport scale;
  std::vector<SymbolicScalar> trace_range;   // distinct nonzero basis traces
  bool monotone_scale = true;
  std::optional<FamilyData> family;
};

inline InvariantReport elliott_report(const ProtoralSystem& sys, const GeneratorEnv& env, long horizon = -1) {
  if (horizon < 0) horizon = sys.default_horizon();
  InvariantReport rep;
  rep.system = sys.name();
  rep.first = sys.first_stage();
  rep.horizon = horizon;
  rep.family = sys.family();
  long end = sys.final_stage(horizon);
  SymbolicScalar prev_unit;
  for (long n = rep.first; n <= end; ++n) {
    const TorusDescriptor& d = sys.stage(n);
    StageSummary s;
    s.n = n;
    s.m = d.size();
    s.amplification = d.amplification;
    s.k0_rank = d.k0_rank();
    s.k1_rank = d.k1_rank();
    s.nondegenerate = is_nondegenerate(d.form, env).kind == NondegeneracyResult::Nondegenerate;
    s.c = sys.scaling_constant(n);
    for (auto& v : trace_pairing_vector(d)) s.basis_traces.push_back(s.c * v);
    s.unit_trace = limit_trace(unit_element(sys, n), sys);
    if (n > rep.first && scalar_sign(s.unit_trace - prev_unit, env) == Sign::Negative) rep.monotone_scale = false;
    prev_unit = s.unit_trace;
    for (auto& v : s.basis_traces)
      if (!v.is_zero() && std::find(rep.trace_range.begin(), rep.trace_range.end(), v) == rep.trace_range.end())
        rep.trace_range.push_back(v);
    if (n < end) s.map = sys.map(n);
    rep.stages.push_back(std::move(s));
  }
  rep.scale = scale_classification(sys, env, horizon);
  return rep;
}

}  // namespace protorus
