#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace protorus;

namespace {

SymbolicScalar S(const char* s) { return SymbolicScalar::parse(s); }

SkewForm random_form(std::mt19937& rng, unsigned m, unsigned gens) {
  static const char* names[] = {"a", "b", "c"};
  std::uniform_int_distribution<long> c(-2, 2);
  SkewForm f(m);
  for (unsigned j = 0; j < m; ++j)
    for (unsigned k = j + 1; k < m; ++k) {
      SymbolicScalar v(Rational(c(rng), 2));
      for (unsigned g = 0; g < gens; ++g) v += SymbolicScalar(Rational(c(rng))) * SymbolicScalar::var(names[g]);
      f.set(j, k, v);
    }
  return f;
}

std::vector<std::vector<SymbolicScalar>> dense(const SkewForm& f) {
  std::vector<std::vector<SymbolicScalar>> a(f.size(), std::vector<SymbolicScalar>(f.size()));
  for (unsigned j = 0; j < f.size(); ++j)
    for (unsigned k = 0; k < f.size(); ++k) a[j][k] = f.at(j, k);
  return a;
}

}  // namespace

TEST(SkewForm, Antisymmetry) {
  SkewForm f(3);
  f.set(0, 2, S("theta"));
  EXPECT_EQ(f.at(2, 0), -S("theta"));
  EXPECT_TRUE(f.at(1, 1).is_zero());
  EXPECT_THROW(f.set(1, 1, S("1")), Error);
  EXPECT_EQ(SkewForm::block_diagonal({S("a"), S("b")}), SkewForm::direct_sum(SkewForm::J(S("a")), SkewForm::J(S("b"))));
}

TEST(Pfaffian, FourByFourFormula) {
  SkewForm f(4);
  f.set(0, 1, S("p12"));
  f.set(0, 2, S("p13"));
  f.set(0, 3, S("p14"));
  f.set(1, 2, S("p23"));
  f.set(1, 3, S("p24"));
  f.set(2, 3, S("p34"));
  EXPECT_EQ(pfaffian(f), S("p12*p34 - p13*p24 + p14*p23"));
  EXPECT_EQ(pfaffian(SkewForm::J(S("theta"))), S("theta"));
  EXPECT_EQ(pfaffian(SkewForm(0)), SymbolicScalar(1));
}

TEST(Pfaffian, OddSubsetRejected) {
  SkewForm f = SkewForm::J(S("theta"));
  try {
    pfaffian(f, Subset{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddSubset);
  }
}

TEST(Pfaffian, SquareEqualsDeterminantOnRandomForms) {
  std::mt19937 rng(29);
  for (unsigned m = 2; m <= 6; m += 2) {
    for (unsigned gens = 1; gens <= 3; ++gens) {
      SkewForm f = random_form(rng, m, gens);
      PfaffianTable pf(f);
      for (auto& I : subset_basis(m, Parity::Even).subsets) {
        SymbolicScalar p = pf(I);
        EXPECT_EQ(p * p, determinant(f, I));
        EXPECT_EQ(determinant(f, I), oracle::leibniz_det(dense(f.restrict(I))));
      }
    }
  }
}

TEST(Trace, PairingVectorOfTwoBlocks) {
  TorusDescriptor t{SkewForm::block_diagonal({S("alpha"), S("beta")}), 1};
  std::vector<SymbolicScalar> want{S("1"), S("alpha"), S("0"), S("0"), S("0"), S("0"), S("beta"), S("alpha*beta")};
  EXPECT_EQ(trace_pairing_vector(t), want);
}

TEST(Trace, ClassTracesAndUnit) {
  TorusDescriptor t{SkewForm::J(S("theta")), 1};
  EXPECT_EQ(trace_of_class(t, {1, -1}), S("1 - theta"));
  TorusDescriptor amp{SkewForm::J(S("theta")), 3};
  EXPECT_EQ(unit_class(amp), (IntVector{3, 0}));
  EXPECT_EQ(t.k0_rank(), 2u);
  EXPECT_EQ(t.k1_rank(), 2u);
}

TEST(Nondegeneracy, RationalAndFormalForms) {
  GeneratorEnv env;
  auto r = is_nondegenerate(SkewForm::J(S("1/2")), env);
  EXPECT_EQ(r.kind, NondegeneracyResult::DegenerateWitness);
  EXPECT_EQ(r.witness, (IntVector{2, 0}));
  EXPECT_EQ(is_nondegenerate(SkewForm::J(S("theta")), env).kind, NondegeneracyResult::Nondegenerate);
  EXPECT_EQ(is_nondegenerate(SkewForm::block_diagonal({S("t1"), S("t2")}), env).kind, NondegeneracyResult::Nondegenerate);
  GeneratorEnv loose;
  loose.set_independence(false);
  EXPECT_EQ(is_nondegenerate(SkewForm::J(S("theta")), loose).kind, NondegeneracyResult::UndecidedAtBound);
}

TEST(Nondegeneracy, WitnessIsValid) {
  GeneratorEnv env;
  for (long q = 2; q <= 7; ++q) {
    SkewForm f = SkewForm::J(SymbolicScalar(Rational(1, q)));
    auto r = is_nondegenerate(f, env);
    ASSERT_EQ(r.kind, NondegeneracyResult::DegenerateWitness);
    bool nonzero = false;
    for (unsigned j = 0; j < 2; ++j) {
      SymbolicScalar row;
      for (unsigned k = 0; k < 2; ++k) row += f.at(j, k) * SymbolicScalar(Rational(r.witness[k]));
      auto c = row.constant_value();
      ASSERT_TRUE(c.has_value());
      EXPECT_EQ(den_of(*c), 1);
      if (r.witness[j] != 0) nonzero = true;
    }
    EXPECT_TRUE(nonzero);
  }
}
