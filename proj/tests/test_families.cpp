#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace protorus;

namespace {

SymbolicScalar S(const char* s) { return SymbolicScalar::parse(s); }

GeneratorEnv env_all() {
  GeneratorEnv env;
  env.declare("theta", Anchor::fixed(parse_rational("0.618"), parse_rational("1e-6")));
  env.declare("theta'", Anchor::fixed(parse_rational("0.414"), parse_rational("1e-6")));
  env.declare("theta0", Anchor::fixed(parse_rational("0.618"), parse_rational("1e-6")));
  env.declare("alpha", Anchor::fixed(parse_rational("0.3"), parse_rational("1e-6")));
  env.declare("beta", Anchor::fixed(parse_rational("0.7"), parse_rational("1e-6")));
  env.declare("t1", Anchor::fixed(parse_rational("0.2"), parse_rational("1e-6")));
  env.declare("t2", Anchor::fixed(parse_rational("0.5"), parse_rational("1e-6")));
  env.declare("t3", Anchor::fixed(parse_rational("0.8"), parse_rational("1e-6")));
  return env;
}

std::vector<FamilyTag> all_tags() {
  return {
      FamilyTag::solenoid(S("theta"), 2),
      FamilyTag::solenoid(S("theta"), 3),
      FamilyTag::stable_corner(SkewForm::J(S("theta"))),
      FamilyTag::dim_changing({S("t1"), S("t2"), S("t3")}),
      FamilyTag::ax7(2, S("theta0")),
      FamilyTag::ax7(3, S("theta0")),
      FamilyTag::k1_engine(S("theta"), {IntMatrix{{2, 1}, {1, 1}}}),
      FamilyTag::infinitesimal_killing(S("alpha"), S("beta")),
  };
}

}  // namespace

TEST(Families, AgreeWithClosedForms) {
  auto env = env_all();
  for (auto& tag : all_tags()) {
    auto sys = build_family(tag, env);
    long end = sys.final_stage(tag.kind == FamilyTag::DimChanging ? sys.default_horizon() : 10);
    for (long n = sys.first_stage(); n <= end; ++n) {
      auto cf = family_closed_forms(tag, n);
      EXPECT_EQ(sys.stage(n).form, cf.form) << sys.name() << " stage " << n;
      EXPECT_EQ(sys.stage(n).amplification, cf.amplification) << sys.name();
      EXPECT_EQ(sys.scaling_constant(n), cf.c) << sys.name() << " stage " << n;
      EXPECT_EQ(limit_trace(unit_element(sys, n), sys), cf.unit_trace) << sys.name() << " stage " << n;
      if (n < end) {
        EXPECT_EQ(sys.map(n).t, cf.t) << sys.name() << " stage " << n;
        EXPECT_EQ(sys.map(n).k0, cf.k0) << sys.name() << " stage " << n;
        EXPECT_EQ(sys.map(n).k1, cf.k1) << sys.name() << " stage " << n;
      }
    }
  }
}

TEST(Families, TraceCompatibilityOfEveryMap) {
  // rho_{n+1}(k0 x) = t_n rho_n(x) on every even basis class
  auto env = env_all();
  for (auto& tag : all_tags()) {
    auto sys = build_family(tag, env);
    long end = sys.final_stage(tag.kind == FamilyTag::DimChanging ? sys.default_horizon() : 6);
    for (long n = sys.first_stage(); n < end; ++n) {
      const auto& m = sys.map(n);
      auto src = trace_pairing_vector(sys.stage(n));
      auto dst = trace_pairing_vector(sys.stage(n + 1));
      for (std::size_t I = 0; I < m.k0.cols(); ++I) {
        if (tag.kind == FamilyTag::InfinitesimalKilling && m.k0(I, I) == 0) continue;
        SymbolicScalar lhs;
        for (std::size_t J = 0; J < m.k0.rows(); ++J) lhs += SymbolicScalar(Rational(m.k0(J, I))) * dst[J];
        EXPECT_EQ(lhs, m.t * src[I]) << sys.name() << " stage " << n << " class " << I;
      }
    }
  }
}

TEST(Solenoid, StageMaps) {
  auto env = env_all();
  for (long N : {2L, 3L, 4L}) {
    auto sys = build_family(FamilyTag::solenoid(S("theta"), N), env);
    for (long n = 1; n <= 5; ++n) {
      EXPECT_EQ(sys.map(n).k0, IntMatrix::diagonal({1, N * N}));
      EXPECT_EQ(sys.map(n).k1, IntMatrix::identity(2).scaled(N));
      EXPECT_EQ(sys.scaling_constant(n), SymbolicScalar(1));
      EXPECT_EQ(unit_class(sys.stage(n)), (IntVector{1, 0}));
    }
  }
}

TEST(AX7, RecursionAndCornerTrace) {
  auto env = env_all();
  EXPECT_EQ(ax7_theta(2, S("theta0"), 1), S("theta0/(2 + theta0)"));
  auto sys = build_family(FamilyTag::ax7(2, S("theta0")), env);
  EXPECT_EQ(sys.map(0).t, S("2/(2 + theta0)"));
  EXPECT_EQ(sys.map(0).kind, MapCase::SameDimProper);
}

TEST(AX7, Identities) {
  auto env = env_all();
  std::mt19937 rng(43);
  std::uniform_int_distribution<long> d(-50, 50);
  SymbolicScalar th0 = S("theta0");
  for (long N : {2L, 3L}) {
    auto sys = build_family(FamilyTag::ax7(N, th0), env);
    IntMatrix DN{{1, 0}, {-1, N}};
    for (long n = 0; n <= 10; ++n) {
      SymbolicScalar s_n(oracle::geometric_tail(N, n));
      SymbolicScalar c = sys.scaling_constant(n);
      EXPECT_EQ(c, SymbolicScalar(1) + th0 * s_n);
      SymbolicScalar Nn(pow_rat(Rational(N), static_cast<unsigned>(n)));
      EXPECT_EQ(c * ax7_theta(N, th0, n), th0 / Nn);
      EXPECT_EQ(limit_trace(unit_element(sys, n), sys), SymbolicScalar(1) + th0 * s_n);
      for (int k = 0; k < 10; ++k) {
        IntVector v{d(rng), d(rng)};
        IntVector w = DN.apply(v);
        EXPECT_EQ(oracle::ax7_F(N, n + 1, w[0], w[1]), oracle::ax7_F(N, n, v[0], v[1]));
        // the trace is a + theta0 * (second coordinate of F_n)
        auto F = oracle::ax7_F(N, n, v[0], v[1]);
        EXPECT_EQ(limit_trace({n, Parity::Even, v}, sys), SymbolicScalar(F.first) + th0 * SymbolicScalar(F.second));
      }
    }
  }
}

TEST(Parameters, Rejected) {
  auto env = env_all();
  auto code = [&](const FamilyTag& t) {
    try {
      build_family(t, env);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigParse;
  };
  EXPECT_EQ(code(FamilyTag::solenoid(S("theta"), 1)), ErrorCode::InvalidParameter);
  EXPECT_EQ(code(FamilyTag::ax7(2, S("3/2"))), ErrorCode::InvalidParameter);
  EXPECT_EQ(code(FamilyTag::infinitesimal_killing(S("alpha"), S("alpha"))), ErrorCode::InvalidParameter);
  EXPECT_EQ(code(FamilyTag::infinitesimal_killing(S("alpha"), S("1 - alpha"))), ErrorCode::InvalidParameter);
  EXPECT_EQ(code(FamilyTag::solenoid(S("phi"), 2)), ErrorCode::MissingAnchor);
  EXPECT_EQ(code(FamilyTag::k1_engine(S("theta"), {})), ErrorCode::InvalidParameter);
}

TEST(DimChanging, FiniteAndInclusions) {
  auto env = env_all();
  auto sys = build_family(FamilyTag::dim_changing({S("t1"), S("t2"), S("t3")}), env);
  EXPECT_EQ(sys.last_stage(), 3);
  EXPECT_EQ(sys.default_horizon(), 2);
  EXPECT_EQ(sys.map(1).k0.rows(), 8u);
  EXPECT_EQ(sys.map(1).k0.cols(), 2u);
  EXPECT_THROW(sys.map(3), Error);
  EXPECT_EQ(is_nondegenerate(sys.stage(3).form, env).kind, NondegeneracyResult::Nondegenerate);
}

TEST(InfinitesimalKilling, IdempotentPreservesTraceOnImage) {
  auto env = env_all();
  auto sys = build_family(FamilyTag::infinitesimal_killing(S("alpha"), S("beta")), env);
  const IntMatrix& k = sys.map(1).k0;
  EXPECT_EQ(k * k, k);
  EXPECT_TRUE(sys.map(1).k1.is_zero());
  auto rho = trace_pairing_vector(sys.stage(1));
  std::vector<SymbolicScalar> kept{rho[0], rho[1], rho[6], rho[7]};
  EXPECT_EQ(kept, (std::vector<SymbolicScalar>{S("1"), S("alpha"), S("beta"), S("alpha*beta")}));
}

TEST(InfinitesimalKilling, Witnesses) {
  IntMatrix id = IntMatrix::identity(4);
  EXPECT_TRUE(check_killing_witness(id, S("alpha"), S("beta"), S("alpha"), S("beta")).ok);
  IntMatrix swap{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  EXPECT_TRUE(check_killing_witness(swap, S("alpha"), S("beta"), S("beta"), S("alpha")).ok);
  // alpha' = alpha + 1 is absorbed by a shear
  IntMatrix shear{{1, -1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, -1}, {0, 0, 0, 1}};
  EXPECT_TRUE(check_killing_witness(shear, S("alpha"), S("beta"), S("alpha + 1"), S("beta")).ok);
  EXPECT_FALSE(check_killing_witness(id, S("alpha"), S("beta"), S("beta"), S("alpha")).ok);
  EXPECT_FALSE(check_killing_witness(id.scaled(2), S("alpha"), S("beta"), S("alpha"), S("beta")).ok);
}

TEST(Classify, SolenoidPairs) {
  auto env = env_all();
  auto a = classify_solenoid_pair(S("theta"), 2, S("theta"), 4, env);
  EXPECT_EQ(a.kind, Classification::Isomorphic);
  EXPECT_EQ(a.u, SymbolicScalar(1));
  auto b = classify_solenoid_pair(S("theta"), 2, S("theta'"), 6, env);
  EXPECT_EQ(b.kind, Classification::NotIsomorphic);
  EXPECT_EQ(b.obstruction, "PrimeSets {2} != {2,3}");
  auto c = classify_solenoid_pair(S("theta"), 2, S("4*theta"), 2, env);
  EXPECT_EQ(c.kind, Classification::Isomorphic);
  EXPECT_EQ(c.u, SymbolicScalar(4));
  EXPECT_EQ(classify_solenoid_pair(S("theta"), 2, S("3*theta"), 2, env).kind, Classification::NotIsomorphic);
  EXPECT_EQ(classify_solenoid_pair(S("theta"), 2, S("theta'"), 2, env).kind, Classification::NotIsomorphic);
  GeneratorEnv loose = env;
  loose.set_independence(false);
  EXPECT_EQ(classify_solenoid_pair(S("theta"), 2, S("theta'"), 2, loose).kind, Classification::UnknownAtBound);
}

TEST(Classify, AX7Pairs) {
  auto env = env_all();
  auto same = classify_ax7_pair(2, S("theta0"), 2, S("theta0"), env);
  EXPECT_EQ(same.kind, Classification::Isomorphic);
  EXPECT_EQ(same.lambda, SymbolicScalar(1));
  EXPECT_EQ(same.u, SymbolicScalar(1));
  EXPECT_EQ(same.v, SymbolicScalar(0));
  EXPECT_EQ(classify_ax7_pair(2, S("theta0"), 6, S("theta0"), env).obstruction, "PrimeSets {2} != {2,3}");
  EXPECT_EQ(classify_ax7_pair(2, S("theta0"), 2, S("theta'"), env).kind, Classification::NotIsomorphic);
  // lambda = L'/L is not constant, so no rational v exists
  EXPECT_EQ(classify_ax7_pair(2, S("theta0"), 4, S("theta0"), env).kind, Classification::NotIsomorphic);
}

TEST(Classify, AX7BoundedSearchWithoutIndependence) {
  auto env = env_all();
  env.set_independence(false);
  // same parameter: lambda = 1, v = 0, u = 1 is found by the search
  auto r = classify_ax7_pair(2, S("theta0"), 2, S("theta0"), env);
  EXPECT_EQ(r.kind, Classification::Isomorphic);
  EXPECT_EQ(classify_ax7_pair(2, S("theta0"), 2, S("theta'"), env).kind, Classification::UnknownAtBound);
}

TEST(Units, Localization) {
  std::vector<Integer> p2{2};
  EXPECT_TRUE(is_localization_unit(Rational(1, 8), p2));
  EXPECT_FALSE(is_localization_unit(Rational(3, 2), p2));
  EXPECT_TRUE(in_localization(Rational(3, 2), p2));
  EXPECT_FALSE(in_localization(Rational(1, 3), p2));
  auto us = bounded_units(p2, 2);
  EXPECT_EQ(us.size(), 10u);
  for (auto& u : us) EXPECT_TRUE(is_localization_unit(u, p2));
}
