#pragma once

#include <memory>
#include <string>
#include <vector>

#include "exact.hpp"
#include "homk.hpp"
#include "intlat.hpp"
#include "prolimit.hpp"
#include "torus.hpp"

namespace protorus {

struct FamilyTag {
  enum Kind { Solenoid, StableCorner, DimChanging, AX7, K1Engine, InfinitesimalKilling } kind = Solenoid;
  SymbolicScalar theta;                 // Solenoid theta, AX7 theta_0, K1Engine theta
  long N = 2;
  SkewForm form;                        // StableCorner
  std::vector<SymbolicScalar> thetas;   // DimChanging
  std::vector<IntMatrix> P;             // K1Engine, last entry repeats
  SymbolicScalar alpha, beta;           // InfinitesimalKilling

  static FamilyTag solenoid(SymbolicScalar theta, long N) {
    FamilyTag t;
    t.kind = Solenoid;
    t.theta = std::move(theta);
    t.N = N;
    return t;
  }
  static FamilyTag stable_corner(SkewForm f) {
    FamilyTag t;
    t.kind = StableCorner;
    t.form = std::move(f);
    return t;
  }
  static FamilyTag dim_changing(std::vector<SymbolicScalar> thetas) {
    FamilyTag t;
    t.kind = DimChanging;
    t.thetas = std::move(thetas);
    return t;
  }
  static FamilyTag ax7(long N, SymbolicScalar theta0) {
    FamilyTag t;
    t.kind = AX7;
    t.N = N;
    t.theta = std::move(theta0);
    return t;
  }
  static FamilyTag k1_engine(SymbolicScalar theta, std::vector<IntMatrix> P) {
    FamilyTag t;
    t.kind = K1Engine;
    t.theta = std::move(theta);
    t.P = std::move(P);
    return t;
  }
  static FamilyTag infinitesimal_killing(SymbolicScalar alpha, SymbolicScalar beta) {
    FamilyTag t;
    t.kind = InfinitesimalKilling;
    t.alpha = std::move(alpha);
    t.beta = std::move(beta);
    return t;
  }
};

inline const char* family_name(FamilyTag::Kind k) {
  switch (k) {
    case FamilyTag::Solenoid: return "solenoid";
    case FamilyTag::StableCorner: return "stable-corner";
    case FamilyTag::DimChanging: return "dimension-changing";
    case FamilyTag::AX7: return "ax7";
    case FamilyTag::K1Engine: return "k1-engine";
    default: return "infinitesimal-killing";
  }
}

namespace detail {

inline SymbolicScalar power_of(long N, long e) {
  return SymbolicScalar(Rational(pow_int(Integer(N), static_cast<unsigned>(e))));
}

inline IntMatrix coordinate_inclusion(unsigned from, unsigned to) {
  IntMatrix M(to, from);
  for (unsigned i = 0; i < from; ++i) M(i, i) = 1;
  return M;
}

// basis positions of {}, {1,2}, {3,4}, {1,2,3,4} in the even basis of rank 4
inline IntMatrix killing_idempotent() {
  SubsetBasis b = subset_basis(4, Parity::Even);
  IntMatrix k(b.size(), b.size());
  for (const Subset& s : {Subset{}, Subset{0, 1}, Subset{2, 3}, Subset{0, 1, 2, 3}}) {
    std::size_t i = b.index_of(s);
    k(i, i) = 1;
  }
  return k;
}

inline void require_N(long N) {
  if (N < 2) throw Error(ErrorCode::InvalidParameter, "N must be >= 2");
}

// Q-linear independence of polynomial scalars via their coefficient rows
inline bool linearly_independent(const std::vector<SymbolicScalar>& xs) {
  std::vector<Monomial> monos;
  for (auto& x : xs) {
    if (!x.is_polynomial()) return false;
    for (auto& [m, c] : x.num().terms())
      if (std::find(monos.begin(), monos.end(), m) == monos.end()) monos.push_back(m);
  }
  IntMatrix A(xs.size(), monos.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Integer l = 1;
    for (auto& m : monos) l = lcm_int(l, den_of(xs[i].num().coefficient(m)));
    for (std::size_t j = 0; j < monos.size(); ++j) A(i, j) = num_of(xs[i].num().coefficient(monos[j]) * l);
  }
  return integer_kernel_rank(A.transpose()).rank == xs.size();
}

}  // namespace detail

// theta_n for AX7 by the defining recursion theta_{n+1} = theta_n / (N + theta_n)
inline SymbolicScalar ax7_theta(long N, const SymbolicScalar& theta0, long n) {
  SymbolicScalar t = theta0;
  for (long k = 0; k < n; ++k) t = t / (SymbolicScalar(N) + t);
  return t;
}

inline ProtoralSystem build_family(const FamilyTag& tag, const GeneratorEnv& env) {
  switch (tag.kind) {
    case FamilyTag::Solenoid: {
      detail::require_N(tag.N);
      require_anchors(tag.theta, env);
      long N = tag.N;
      SymbolicScalar theta = tag.theta;
      auto stage = [N, theta](long n) {
        return TorusDescriptor{SkewForm::J(theta / detail::power_of(N, 2 * (n - 1))), 1};
      };
      auto map = [N, stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::UnitalToric;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.M = IntMatrix::identity(2).scaled(N);
        return build_connecting_map(s, env);
      };
      ProtoralSystem sys("solenoid(" + theta.str() + "," + std::to_string(N) + ")", 1, std::nullopt, stage, map, env);
      std::string R = "Z[1/" + std::to_string(N) + "]";
      sys.set_family({"solenoid", {ScaleCertificate::Unital, {}, "every connecting map is unital toric"},
                      "Z + " + R, R + "^2", "rho(a, q) = a + " + theta.str() + "*q"});
      return sys;
    }
    case FamilyTag::StableCorner: {
      if (tag.form.size() < 2) throw Error(ErrorCode::InvalidParameter, "stable corner needs a form of size >= 2");
      for (auto& v : tag.form.variables()) env.anchor(v);
      SkewForm f = tag.form;
      auto stage = [f](long n) { return TorusDescriptor{f, pow_int(2, static_cast<unsigned>(n - 1))}; };
      auto map = [f, stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::PureCorner;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.M = IntMatrix::identity(f.size());
        s.corner_trace = SymbolicScalar(Rational(1, 2));
        return build_connecting_map(s, env);
      };
      ProtoralSystem sys("stable-corner(m=" + std::to_string(f.size()) + ")", 1, std::nullopt, stage, map, env);
      std::string rk = std::to_string(parity_rank(f.size(), Parity::Even));
      sys.set_family({"stable-corner", {ScaleCertificate::GeometricInfinite, {}, "t_n = 1/2 for all n, so c_n = 2^(n-1)"},
                      "Z^" + rk + " (stationary)", "Z^" + rk + " (stationary)", "rho(x) = pf-pairing of x; projection scale is the full positive cone"});
      return sys;
    }
    case FamilyTag::DimChanging: {
      if (tag.thetas.empty()) throw Error(ErrorCode::InvalidParameter, "dimension-changing family needs at least one theta");
      for (auto& t : tag.thetas) require_anchors(t, env);
      auto thetas = std::make_shared<std::vector<SymbolicScalar>>(tag.thetas);
      auto stage = [thetas](long n) {
        std::vector<SymbolicScalar> ts(thetas->begin(), thetas->begin() + n);
        return TorusDescriptor{SkewForm::block_diagonal(ts), pow_int(2, static_cast<unsigned>(n - 1))};
      };
      auto map = [stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::DimChangingCorner;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.M = detail::coordinate_inclusion(static_cast<unsigned>(2 * n), static_cast<unsigned>(2 * n + 2));
        s.corner_trace = SymbolicScalar(Rational(1, 2));
        return build_connecting_map(s, env);
      };
      long last = static_cast<long>(tag.thetas.size());
      ProtoralSystem sys("dimension-changing(" + std::to_string(last) + " parameters)", 1, last, stage, map, env);
      sys.set_family({"dimension-changing", {ScaleCertificate::GeometricInfinite, {}, "t_n = 1/2 for all n, so c_n = 2^(n-1)"},
                      "Lambda^even(Z^(2n)) along coordinate inclusions", "Lambda^odd(Z^(2n)) along coordinate inclusions",
                      "trace range generated by squarefree products of the theta_j"});
      sys.set_default_horizon(last - 1);
      return sys;
    }
    case FamilyTag::AX7: {
      detail::require_N(tag.N);
      require_anchors(tag.theta, env);
      if (require_sign(tag.theta, env) != Sign::Positive || require_sign(SymbolicScalar(1) - tag.theta, env) != Sign::Positive)
        throw Error(ErrorCode::InvalidParameter, "theta_0 must lie in (0,1)");
      long N = tag.N;
      SymbolicScalar th0 = tag.theta;
      auto stage = [N, th0](long n) { return TorusDescriptor{SkewForm::J(ax7_theta(N, th0, n)), 1}; };
      auto map = [N, th0, stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::SameDimProper;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.M = IntMatrix::diagonal({1, N});
        s.corner_trace = SymbolicScalar(1) - ax7_theta(N, th0, n + 1);
        s.beta0 = IntMatrix{{1, 0}, {-1, 1}};
        s.beta1 = IntMatrix::identity(2);
        return build_connecting_map(s, env);
      };
      ProtoralSystem sys("ax7(" + std::to_string(N) + "," + th0.str() + ")", 0, std::nullopt, stage, map, env);
      SymbolicScalar L = SymbolicScalar(1) + th0 / SymbolicScalar(N - 1);
      std::string R = "Z[1/" + std::to_string(N) + "]";
      sys.set_family({"ax7", {ScaleCertificate::FiniteLimit, L, "c_n = 1 + theta_0 s_n increases to 1 + theta_0/(N-1)"},
                      "Z + " + R, "Z + " + R, "F_n(a,b) = (a, b/N^n + a s_n), rho = a + theta_0 * second coordinate"});
      return sys;
    }
    case FamilyTag::K1Engine: {
      require_anchors(tag.theta, env);
      if (tag.P.empty()) throw Error(ErrorCode::InvalidParameter, "k1-engine needs at least one P matrix");
      for (auto& p : tag.P)
        if (p.rows() != 2 || p.cols() != 2) throw Error(ErrorCode::InvalidParameter, "P matrices must be 2x2");
      SymbolicScalar th = tag.theta;
      auto Ps = std::make_shared<std::vector<IntMatrix>>(tag.P);
      auto stage = [th](long) { return TorusDescriptor{SkewForm::J(th), 1}; };
      auto map = [Ps, stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::AbstractK;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.kappa0 = IntMatrix::identity(2);
        s.kappa1 = (*Ps)[std::min<std::size_t>(static_cast<std::size_t>(n - 1), Ps->size() - 1)];
        s.t = SymbolicScalar(1);
        return build_connecting_map(s, env);
      };
      ProtoralSystem sys("k1-engine(" + th.str() + ")", 1, std::nullopt, stage, map, env);
      sys.set_family({"k1-engine", {ScaleCertificate::Unital, {}, "kappa_0 = id and t = 1 at every stage"},
                      "Z^2", "lim(Z^2, P_n)", "rho(a, q) = a + " + th.str() + "*q"});
      return sys;
    }
    case FamilyTag::InfinitesimalKilling: {
      require_anchors(tag.alpha, env);
      require_anchors(tag.beta, env);
      if (!detail::linearly_independent({SymbolicScalar(1), tag.alpha, tag.beta, tag.alpha * tag.beta}))
        throw Error(ErrorCode::InvalidParameter, "1, alpha, beta, alpha*beta must be rationally independent");
      SkewForm f = SkewForm::direct_sum(SkewForm::J(tag.alpha), SkewForm::J(tag.beta));
      auto stage = [f](long) { return TorusDescriptor{f, 1}; };
      auto map = [stage, env](long n) {
        ConnectingMapSpec s;
        s.kind = MapCase::AbstractK;
        s.source = stage(n);
        s.target = stage(n + 1);
        s.kappa0 = detail::killing_idempotent();
        s.kappa1 = IntMatrix(8, 8);
        s.t = SymbolicScalar(1);
        return build_connecting_map(s, env);
      };
      ProtoralSystem sys("infinitesimal-killing(" + tag.alpha.str() + "," + tag.beta.str() + ")", 1, std::nullopt, stage, map, env);
      sys.set_family({"infinitesimal-killing", {ScaleCertificate::Unital, {}, "kappa_0 is unital and t = 1"},
                      "Z^4 = <1, e12, e34, e1234>", "0", "rho = (1, alpha, beta, alpha*beta) on the surviving summand"});
      return sys;
    }
  }
  throw Error(ErrorCode::InvalidParameter, "unknown family");
}

// ---------------------------------------------------------------------------
// Closed forms used as oracles

struct ClosedForms {
  SymbolicScalar c, t, unit_trace;
  IntMatrix k0, k1;
  SkewForm form;
  Integer amplification = 1;
};

inline ClosedForms family_closed_forms(const FamilyTag& tag, long n) {
  ClosedForms r;
  switch (tag.kind) {
    case FamilyTag::Solenoid: {
      Integer N = tag.N;
      r.c = r.t = r.unit_trace = SymbolicScalar(1);
      r.k0 = IntMatrix::diagonal({1, N * N});
      r.k1 = IntMatrix::diagonal({N, N});
      r.form = SkewForm::J(tag.theta / SymbolicScalar(Rational(pow_int(N, static_cast<unsigned>(2 * (n - 1))))));
      return r;
    }
    case FamilyTag::StableCorner:
    case FamilyTag::DimChanging: {
      r.amplification = pow_int(2, static_cast<unsigned>(n - 1));
      r.c = r.unit_trace = SymbolicScalar(Rational(r.amplification));
      r.t = SymbolicScalar(Rational(1, 2));
      if (tag.kind == FamilyTag::StableCorner) {
        r.form = tag.form;
        r.k0 = IntMatrix::identity(parity_rank(tag.form.size(), Parity::Even));
        r.k1 = IntMatrix::identity(parity_rank(tag.form.size(), Parity::Odd));
      } else {
        std::vector<SymbolicScalar> ts(tag.thetas.begin(), tag.thetas.begin() + n);
        r.form = SkewForm::block_diagonal(ts);
        unsigned m = static_cast<unsigned>(2 * n);
        for (Parity p : {Parity::Even, Parity::Odd}) {
          SubsetBasis src = subset_basis(m, p), dst = subset_basis(m + 2, p);
          IntMatrix k(dst.size(), src.size());
          for (std::size_t j = 0; j < src.size(); ++j) k(dst.index_of(src.subsets[j]), j) = 1;
          (p == Parity::Even ? r.k0 : r.k1) = k;
        }
      }
      return r;
    }
    case FamilyTag::AX7: {
      long N = tag.N;
      SymbolicScalar s_n, s_next;
      for (long k = 1; k <= n + 1; ++k) {
        SymbolicScalar term = SymbolicScalar(1) / detail::power_of(N, k);
        if (k <= n) s_n += term;
        s_next += term;
      }
      r.c = r.unit_trace = SymbolicScalar(1) + tag.theta * s_n;
      SymbolicScalar c_next = SymbolicScalar(1) + tag.theta * s_next;
      r.t = r.c / c_next;
      r.form = SkewForm::J(tag.theta / (detail::power_of(N, n) * r.c));
      r.k0 = IntMatrix{{1, 0}, {-1, N}};
      r.k1 = IntMatrix::diagonal({1, N});
      return r;
    }
    case FamilyTag::K1Engine: {
      r.c = r.t = r.unit_trace = SymbolicScalar(1);
      r.form = SkewForm::J(tag.theta);
      r.k0 = IntMatrix::identity(2);
      r.k1 = tag.P[std::min<std::size_t>(static_cast<std::size_t>(n - 1), tag.P.size() - 1)];
      return r;
    }
    case FamilyTag::InfinitesimalKilling: {
      r.c = r.t = r.unit_trace = SymbolicScalar(1);
      r.form = SkewForm::direct_sum(SkewForm::J(tag.alpha), SkewForm::J(tag.beta));
      r.k0 = detail::killing_idempotent();
      r.k1 = IntMatrix(8, 8);
      return r;
    }
  }
  throw Error(ErrorCode::InvalidParameter, "unknown family");
}

// ---------------------------------------------------------------------------
// Classification

inline std::vector<Integer> prime_set(long N) { return prime_divisors(Integer(N)); }

inline bool in_localization(const Rational& q, const std::vector<Integer>& primes) {
  return strip_primes(den_of(q), primes) == 1;
}

inline bool is_localization_unit(const Rational& q, const std::vector<Integer>& primes) {
  return q != 0 && strip_primes(num_of(q), primes) == 1 && strip_primes(den_of(q), primes) == 1;
}

// units +-prod p^k with |k| <= bound, ordered by total exponent then sign
inline std::vector<Rational> bounded_units(const std::vector<Integer>& primes, long bound) {
  std::vector<Rational> out{Rational(1)};
  for (auto& p : primes) {
    std::vector<Rational> next;
    for (auto& u : out)
      for (long k = -bound; k <= bound; ++k) {
        Rational f = 1;
        for (long i = 0; i < (k < 0 ? -k : k); ++i) f *= Rational(p);
        next.push_back(k < 0 ? Rational(u / f) : Rational(u * f));
      }
    out = std::move(next);
  }
  std::vector<Rational> signed_units;
  for (auto& u : out) {
    signed_units.push_back(u);
    signed_units.push_back(-u);
  }
  std::stable_sort(signed_units.begin(), signed_units.end(), [](const Rational& a, const Rational& b) {
    auto size = [](const Rational& x) { return abs(num_of(x)) * den_of(x); };
    return size(a) < size(b);
  });
  return signed_units;
}

struct Classification {
  enum Kind { Isomorphic, NotIsomorphic, UnknownAtBound } kind = UnknownAtBound;
  std::string obstruction;
  // solenoid witness: theta' = u * theta
  SymbolicScalar u;
  // ax7 witness
  int epsilon = 1;
  SymbolicScalar v, lambda;
};

inline const char* classification_name(Classification::Kind k) {
  switch (k) {
    case Classification::Isomorphic: return "Isomorphic";
    case Classification::NotIsomorphic: return "NotIsomorphic";
    default: return "UnknownAtBound";
  }
}

namespace detail {

inline std::string prime_list(const std::vector<Integer>& ps) {
  std::string s = "{";
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? "," : "") + ps[i].str();
  return s + "}";
}

inline std::optional<Classification> prime_obstruction(long N, long M) {
  auto pn = prime_set(N), pm = prime_set(M);
  if (pn == pm) return std::nullopt;
  Classification c;
  c.kind = Classification::NotIsomorphic;
  c.obstruction = "PrimeSets " + prime_list(pn) + " != " + prime_list(pm);
  return c;
}

}  // namespace detail

inline Classification classify_solenoid_pair(const SymbolicScalar& theta, long N, const SymbolicScalar& theta2, long M,
                                             const GeneratorEnv& env, long unit_exponent_bound = 8, int max_refinements = -1) {
  detail::require_N(N);
  detail::require_N(M);
  if (auto ob = detail::prime_obstruction(N, M)) return *ob;
  auto primes = prime_set(N);
  Classification c;
  SymbolicScalar ratio = theta2 / theta;
  if (auto q = ratio.constant_value()) {
    if (is_localization_unit(*q, primes)) {
      c.kind = Classification::Isomorphic;
      c.u = ratio;
    } else {
      c.kind = Classification::NotIsomorphic;
      c.obstruction = "trace ratio " + to_string(*q) + " is not a unit of Z[1/" + std::to_string(N) + "]";
    }
    return c;
  }
  if (env.independence_assertion()) {
    c.kind = Classification::NotIsomorphic;
    c.obstruction = "trace ratio " + ratio.str() + " is not rational under the independence assertion";
    return c;
  }
  for (auto& u : bounded_units(primes, unit_exponent_bound)) {
    Sign s = scalar_sign(theta2 - SymbolicScalar(u) * theta, env, max_refinements);
    if (s == Sign::Undecided) throw Error(ErrorCode::UndecidedSign, "cannot separate theta' from " + to_string(u) + "*theta");
  }
  c.kind = Classification::UnknownAtBound;
  c.obstruction = "no unit within the exponent bound; larger units not excluded";
  return c;
}

struct AX7Bounds {
  long unit_exponent = 4;
  long v_numerator = 8;
  long v_depth = 4;
};

inline Classification classify_ax7_pair(long N, const SymbolicScalar& theta0, long M, const SymbolicScalar& theta0b,
                                        const GeneratorEnv& env, AX7Bounds bounds = {}, int max_refinements = -1) {
  detail::require_N(N);
  detail::require_N(M);
  if (auto ob = detail::prime_obstruction(N, M)) return *ob;
  auto primes = prime_set(N);
  SymbolicScalar L = SymbolicScalar(1) + theta0 / SymbolicScalar(N - 1);
  SymbolicScalar Lb = SymbolicScalar(1) + theta0b / SymbolicScalar(M - 1);
  Classification c;

  auto accept = [&](int eps, const SymbolicScalar& v, const SymbolicScalar& u, const SymbolicScalar& lam) {
    c.kind = Classification::Isomorphic;
    c.epsilon = eps;
    c.v = v;
    c.u = u;
    c.lambda = lam;
    return c;
  };

  if (env.independence_assertion()) {
    // L' = lambda L fixes lambda; the other two equations then force v and u
    SymbolicScalar lam = Lb / L;
    for (int eps : {1, -1}) {
      SymbolicScalar v = (lam - SymbolicScalar(eps)) / theta0b;
      SymbolicScalar u = lam * theta0 / theta0b;
      auto vq = v.constant_value();
      auto uq = u.constant_value();
      if (vq && uq && in_localization(*vq, primes) && is_localization_unit(*uq, primes) &&
          require_sign(lam, env, max_refinements) == Sign::Positive)
        return accept(eps, v, u, lam);
    }
    c.kind = Classification::NotIsomorphic;
    c.obstruction = "no epsilon, v in R, unit u satisfy the scale and trace equations (lambda = " + lam.str() + ")";
    return c;
  }

  bool undecided = false;
  auto units = bounded_units(primes, bounds.unit_exponent);
  for (int eps : {1, -1})
    for (long k = 0; k <= bounds.v_depth; ++k)
      for (long a = -bounds.v_numerator; a <= bounds.v_numerator; ++a) {
        Rational vq = Rational(a) / Rational(pow_int(Integer(N), static_cast<unsigned>(k)));
        if (k > 0 && a % N == 0) continue;
        SymbolicScalar v(vq);
        SymbolicScalar lam = SymbolicScalar(eps) + theta0b * v;
        Sign sl = scalar_sign(Lb - lam * L, env, max_refinements);
        if (sl == Sign::Undecided) undecided = true;
        if (sl != Sign::Zero) continue;
        for (auto& uq : units) {
          SymbolicScalar u(uq);
          Sign st = scalar_sign(theta0b * u - lam * theta0, env, max_refinements);
          if (st == Sign::Zero && scalar_sign(lam, env, max_refinements) == Sign::Positive) return accept(eps, v, u, lam);
          if (st == Sign::Undecided) undecided = true;
        }
      }
  c.kind = Classification::UnknownAtBound;
  c.obstruction = undecided ? "some candidates could not be separated numerically" : "no witness within bounds";
  return c;
}

struct WitnessCheck {
  bool ok = false;
  std::string reason;
};

// G in GL4(Z) fixing (1,0,0,0)^t with (1, a', b', a'b') G = (1, a, b, ab)
inline WitnessCheck check_killing_witness(const IntMatrix& G, const SymbolicScalar& a, const SymbolicScalar& b,
                                          const SymbolicScalar& a2, const SymbolicScalar& b2) {
  WitnessCheck w;
  if (G.rows() != 4 || G.cols() != 4) throw Error(ErrorCode::DimensionMismatch, "witness must be 4x4");
  if (abs(bareiss_det(G)) != 1) {
    w.reason = "G is not unimodular";
    return w;
  }
  if (G.column(0) != IntVector{1, 0, 0, 0}) {
    w.reason = "G does not fix (1,0,0,0)";
    return w;
  }
  std::vector<SymbolicScalar> lhs{SymbolicScalar(1), a2, b2, a2 * b2}, rhs{SymbolicScalar(1), a, b, a * b};
  for (std::size_t j = 0; j < 4; ++j) {
    SymbolicScalar s;
    for (std::size_t i = 0; i < 4; ++i)
      if (G(i, j) != 0) s += lhs[i] * SymbolicScalar(Rational(G(i, j)));
    if (s != rhs[j]) {
      w.reason = "row identity fails in column " + std::to_string(j + 1);
      return w;
    }
  }
  w.ok = true;
  return w;
}

}  // namespace protorus
