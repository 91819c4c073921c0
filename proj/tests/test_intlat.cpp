#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace protorus;

TEST(Subsets, BasisOrderAndRanks) {
  auto b = subset_basis(4, Parity::Even);
  std::vector<std::string> got;
  for (auto& s : b.subsets) got.push_back(subset_label(s));
  EXPECT_EQ(got, (std::vector<std::string>{"{}", "{1,2}", "{1,3}", "{1,4}", "{2,3}", "{2,4}", "{3,4}", "{1,2,3,4}"}));
  for (unsigned m = 1; m <= 6; ++m) {
    EXPECT_EQ(parity_rank(m, Parity::Even), std::size_t(1) << (m - 1));
    EXPECT_EQ(subset_basis(m, Parity::Odd).size(), parity_rank(m, Parity::Odd));
    EXPECT_EQ(subset_basis(m, Parity::Full).size(), std::size_t(1) << m);
  }
  EXPECT_EQ(parity_rank(0, Parity::Even), 1u);
  EXPECT_EQ(parity_rank(0, Parity::Odd), 0u);
}

TEST(Exterior, ParityOfShear) {
  IntMatrix D{{1, 0}, {-1, 2}};
  EXPECT_EQ(exterior_parity(D, Parity::Even), (IntMatrix{{1, 0}, {0, 2}}));
  EXPECT_EQ(exterior_parity(D, Parity::Odd), D);
  EXPECT_EQ(exterior_parity(IntMatrix::identity(2).scaled(3), Parity::Even), (IntMatrix{{1, 0}, {0, 9}}));
}

TEST(Exterior, MatchesBruteForceMinors) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> sz(1, 4);
  for (int it = 0; it < 80; ++it) {
    IntMatrix A = oracle::random_matrix(rng, sz(rng), sz(rng), 3);
    for (unsigned k = 0; k <= std::min(A.rows(), A.cols()); ++k) EXPECT_EQ(exterior_power(A, k), oracle::exterior_power(A, k));
  }
}

TEST(Exterior, FunctorialOnRandomPairs) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> sz(1, 4);
  for (int it = 0; it < 100; ++it) {
    std::size_t n = sz(rng), k = sz(rng), m = sz(rng);
    IntMatrix A = oracle::random_matrix(rng, n, k, 3), B = oracle::random_matrix(rng, k, m, 3);
    for (Parity p : {Parity::Even, Parity::Odd}) {
      if (n != k || k != m) continue;
      EXPECT_EQ(exterior_parity(A * B, p), exterior_parity(A, p) * exterior_parity(B, p));
    }
    for (unsigned q = 0; q <= std::min({n, k, m}); ++q) EXPECT_EQ(exterior_power(A * B, q), exterior_power(A, q) * exterior_power(B, q));
  }
}

TEST(Determinant, BareissMatchesLeibniz) {
  std::mt19937 rng(7);
  for (int it = 0; it < 60; ++it) {
    std::size_t n = 1 + it % 5;
    IntMatrix A = oracle::random_matrix(rng, n, n, 4);
    EXPECT_EQ(bareiss_det(A), oracle::minor(A, oracle::k_subsets(n, n)[0], oracle::k_subsets(n, n)[0]));
  }
}

TEST(Smith, DecompositionAndDivisibility) {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> sz(1, 4);
  for (int it = 0; it < 80; ++it) {
    IntMatrix A = oracle::random_matrix(rng, sz(rng), sz(rng), 5);
    SmithForm s = smith_normal_form(A);
    EXPECT_EQ(s.U * A * s.V, s.D);
    EXPECT_EQ(s.U * s.U_inv, IntMatrix::identity(A.rows()));
    EXPECT_EQ(abs(bareiss_det(s.U)), Integer(1));
    EXPECT_EQ(abs(bareiss_det(s.V)), Integer(1));
    auto d = s.invariant_factors();
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_GE(d[i], 0);
      if (i + 1 < d.size() && d[i] != 0) EXPECT_EQ(d[i + 1] % d[i], 0);
      for (std::size_t r = 0; r < s.D.rows(); ++r)
        for (std::size_t c = 0; c < s.D.cols(); ++c)
          if (r != c) EXPECT_EQ(s.D(r, c), 0);
    }
    // d_1 ... d_k equals the gcd of the k x k minors
    Integer prod = 1;
    for (unsigned k = 1; k <= d.size(); ++k) {
      prod *= d[k - 1];
      EXPECT_EQ(prod, oracle::determinantal_divisor(A, k));
    }
  }
}

TEST(Kernel, RankAndBasis) {
  std::mt19937 rng(17);
  for (int it = 0; it < 40; ++it) {
    IntMatrix A = oracle::random_matrix(rng, 2, 4, 3);
    auto kr = integer_kernel_rank(A);
    EXPECT_EQ(kr.rank + kr.basis.size(), 4u);
    for (auto& v : kr.basis) EXPECT_EQ(A.apply(v), IntVector(2, 0));
  }
  IntMatrix B{{1, 2}, {2, 4}};
  EXPECT_EQ(integer_kernel_rank(B).rank, 1u);
}

TEST(Cosets, ScalarLattice) {
  auto cd = coset_representatives(IntMatrix::identity(2).scaled(2));
  EXPECT_TRUE(cd.finite);
  EXPECT_EQ(cd.index, Integer(4));
  EXPECT_EQ(cd.representatives, (std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Cosets, CompleteAndIrredundant) {
  std::mt19937 rng(23);
  int done = 0;
  while (done < 30) {
    IntMatrix M = oracle::random_matrix(rng, 2, 2, 4);
    Integer det = bareiss_det(M);
    if (det == 0) continue;
    ++done;
    auto cd = coset_representatives(M);
    ASSERT_EQ(Integer(cd.representatives.size()), abs(det));
    EXPECT_EQ(cd.index, abs(det));
    // r - r' in M Z^2 iff adj(M)(r - r') is divisible by det
    IntMatrix adj{{0, 0}, {0, 0}};
    adj(0, 0) = M(1, 1), adj(0, 1) = -M(0, 1), adj(1, 0) = -M(1, 0), adj(1, 1) = M(0, 0);
    auto same = [&](const IntVector& a, const IntVector& b) {
      IntVector d{a[0] - b[0], a[1] - b[1]};
      IntVector w = adj.apply(d);
      return w[0] % det == 0 && w[1] % det == 0;
    };
    for (std::size_t i = 0; i < cd.representatives.size(); ++i)
      for (std::size_t j = i + 1; j < cd.representatives.size(); ++j) EXPECT_FALSE(same(cd.representatives[i], cd.representatives[j]));
  }
}

TEST(Cosets, RectangularGivesInfiniteIndex) {
  IntMatrix M{{2}, {0}};
  auto cd = coset_representatives(M);
  EXPECT_FALSE(cd.finite);
  EXPECT_EQ(cd.representatives.size(), 2u);
  EXPECT_EQ(cd.free_complement.cols(), 1u);
  IntMatrix singular{{1, 2}, {2, 4}};
  try {
    coset_representatives(singular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFullColumnRank);
  }
}
