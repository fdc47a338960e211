#include <gtest/gtest.h>

#include <set>

#include "qfilter/analytics.hpp"
#include "qfilter/pauli.hpp"
#include "test_util.hpp"

using namespace qfilter;
using qtest::oracle_pauli;

namespace {
PauliString P(const char* s) { return PauliString::from_text(s); }
}  // namespace

TEST(Pauli, SquareOfXIsIdentity) {
  const PauliString r = multiply(P("X"), P("X"));
  EXPECT_TRUE(r.is_identity());
  EXPECT_EQ(r.phase_exp(), 0);
}

TEST(Pauli, XTimesZIsMinusIY) {
  const PauliString r = multiply(P("X"), P("Z"));
  EXPECT_EQ(r, P("-iY"));
  EXPECT_EQ(r.sign_exponent(), 3);
  EXPECT_LT(qtest::max_abs(oracle_pauli(r) - qtest::pauli2('X') * qtest::pauli2('Z')), 1e-15);
}

TEST(Pauli, DisjointSupportsMultiplyToTensor) {
  EXPECT_EQ(multiply(P("XI"), P("IZ")), P("XZ"));
}

TEST(Pauli, YHasUnitPhaseInXZConvention) {
  const PauliString y = P("Y");
  EXPECT_EQ(y.phase_exp(), 1);
  EXPECT_EQ(y.sign_exponent(), 0);
  EXPECT_TRUE(y.is_hermitian());
}

TEST(Pauli, CommutationExamples) {
  EXPECT_TRUE(commutes(P("X"), P("X")));
  EXPECT_FALSE(commutes(P("X"), P("Z")));
  // One anticommuting position: X vs Y on qubit 0.
  EXPECT_FALSE(commutes(P("XY"), P("YY")));
  const qtest::Mat a = oracle_pauli(P("XY")), b = oracle_pauli(P("YY"));
  EXPECT_GT(qtest::max_abs(a * b - b * a), 1.0);
  // Two anticommuting positions cancel.
  EXPECT_TRUE(commutes(P("XY"), P("YX")));
  const qtest::Mat c = oracle_pauli(P("YX"));
  EXPECT_LT(qtest::max_abs(a * c - c * a), 1e-15);
}

TEST(Pauli, WeightExamples) {
  EXPECT_EQ(weight(P("III")), 0u);
  EXPECT_EQ(weight(P("IXYIZ")), 3u);
  EXPECT_EQ(weight(P("XX")), 2u);
}

TEST(Pauli, TypeCountExamples) {
  EXPECT_EQ(type_count(P("II")), (PauliTypeCount{0, 0, 0}));
  EXPECT_EQ(type_count(P("XYZ")), (PauliTypeCount{1, 1, 1}));
  EXPECT_EQ(type_count(P("XXZ")), (PauliTypeCount{2, 0, 1}));
}

TEST(Pauli, EnumerationExamples) {
  EXPECT_EQ(enumerate_paulis(1).size(), 4u);
  EXPECT_EQ(enumerate_paulis(2).size(), 16u);
  EXPECT_EQ(enumerate_paulis(3, 1).size(), 10u);
}

TEST(Pauli, EnumerationCountsMatchBinomialSum) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      uint64_t expected = 0;
      for (std::size_t i = 0; i <= k; ++i) expected += binomial(n, i) * uint64_t(std::pow(3, i));
      const auto all = enumerate_paulis(n, k);
      EXPECT_EQ(all.size(), expected);
      EXPECT_EQ(count_paulis_up_to_weight(n, k), expected);
      std::set<std::pair<uint64_t, uint64_t>> seen;
      for (const auto& p : all) {
        EXPECT_LE(weight(p), k);
        EXPECT_EQ(p.phase_exp(), p.phase_free().phase_exp());
        seen.insert({p.x_mask(), p.z_mask()});
      }
      EXPECT_EQ(seen.size(), all.size());
    }
  }
}

TEST(Pauli, EnumerationOrderIsZThenX) {
  const auto all = enumerate_paulis(3);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto a = std::make_pair(all[i - 1].z_mask(), all[i - 1].x_mask());
    const auto b = std::make_pair(all[i].z_mask(), all[i].x_mask());
    EXPECT_LT(a, b);
  }
}

TEST(Pauli, EnumerationGuard) {
  EXPECT_THROW(enumerate_paulis(kMaxEnumerationQubits + 1), std::invalid_argument);
  EXPECT_THROW(enumerate_paulis(0), std::invalid_argument);
  EXPECT_THROW(enumerate_paulis(kMaxEnumerationQubits + 1, 1), std::invalid_argument);
}

TEST(Pauli, DimensionMismatchThrows) {
  EXPECT_THROW(multiply(P("X"), P("XX")), std::invalid_argument);
  EXPECT_THROW(commutes(P("X"), P("XX")), std::invalid_argument);
}

TEST(Pauli, TextRoundTrip) {
  for (const char* s : {"-IXYZ", "+iX", "-iYY", "+Z", "+IIII"}) {
    EXPECT_EQ(P(s).str(), std::string(s));
  }
  EXPECT_EQ(P("XYZ").str(), "+XYZ");
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    const PauliString p = qtest::random_pauli(1 + t % 130, rng, true);
    EXPECT_EQ(PauliString::from_text(p.str()), p);
  }
  EXPECT_THROW(P("XQ"), std::invalid_argument);
  EXPECT_THROW(P("-"), std::invalid_argument);
}

TEST(PauliProperty, Associativity) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + t % 100;
    const auto a = qtest::random_pauli(n, rng, true);
    const auto b = qtest::random_pauli(n, rng, true);
    const auto c = qtest::random_pauli(n, rng, true);
    EXPECT_EQ(multiply(a, multiply(b, c)), multiply(multiply(a, b), c));
  }
}

TEST(PauliProperty, SquaresAreSignedIdentity) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 2000; ++t) {
    const auto a = qtest::random_pauli(1 + t % 100, rng, true);
    const PauliString sq = multiply(a, a);
    EXPECT_TRUE(sq.is_identity());
    EXPECT_TRUE(sq.phase_exp() == 0 || sq.phase_exp() == 2);
  }
}

TEST(PauliProperty, CommutationIsSymmetricExhaustive) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto all = enumerate_paulis(n);
    for (const auto& a : all) {
      for (const auto& b : all) EXPECT_EQ(commutes(a, b), commutes(b, a));
    }
  }
}

TEST(PauliProperty, CommutationMatchesMatrixOracle) {
  const auto all = enumerate_paulis(3);
  for (const auto& a : all) {
    for (const auto& b : all) {
      const qtest::Mat ma = oracle_pauli(a), mb = oracle_pauli(b);
      const bool oracle = qtest::max_abs(ma * mb - mb * ma) < 1e-12;
      EXPECT_EQ(commutes(a, b), oracle);
    }
  }
}

TEST(PauliProperty, ProductMatchesMatrixOracleWithPhase) {
  const auto all = enumerate_paulis(2);
  for (const auto& a0 : all) {
    for (const auto& b0 : all) {
      for (unsigned pa = 0; pa < 4; ++pa) {
        PauliString a = a0, b = b0;
        a.set_phase_exp(a.phase_exp() + pa);
        b.set_phase_exp(b.phase_exp() + 3 * pa);
        const qtest::Mat expect = oracle_pauli(a) * oracle_pauli(b);
        EXPECT_LT(qtest::max_abs(oracle_pauli(multiply(a, b)) - expect), 1e-14);
      }
    }
  }
}

TEST(PauliProperty, MultiWordCommutationMatchesPerQubitCount) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 60 + t % 80;
    const auto a = qtest::random_pauli(n, rng, false);
    const auto b = qtest::random_pauli(n, rng, false);
    unsigned anti = 0;
    for (std::size_t q = 0; q < n; ++q) anti += (a.x(q) && b.z(q)) ^ (a.z(q) && b.x(q));
    EXPECT_EQ(commutes(a, b), anti % 2 == 0);
  }
}

TEST(PauliProperty, TypeCountSumsToWeight) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& p : enumerate_paulis(n)) {
      const PauliTypeCount t = type_count(p);
      EXPECT_EQ(t.weight(), weight(p));
      EXPECT_LE(t.weight(), n);
    }
  }
}
