#include <gtest/gtest.h>

#include "qfilter/clifford.hpp"
#include "test_util.hpp"

using namespace qfilter;

namespace {

PauliString P(const char* s) { return PauliString::from_text(s); }

qtest::Mat oracle_unitary(const CliffordCircuit& c) {
  const std::size_t d = std::size_t{1} << c.n_qubits();
  qtest::Mat u = qtest::Mat::Identity(d, d);
  for (const Gate& g : c.gates()) u = qtest::oracle_gate(g, c.n_qubits()) * u;
  return u;
}

CliffordTableau tab(std::size_t n, const char* text) {
  return tableau_from_circuit(CliffordCircuit::from_text(n, text));
}

}  // namespace

TEST(Clifford, ForwardCxSpreadsXFromControl) {
  EXPECT_EQ(conjugate_forward(tab(2, "CX 0 1"), P("XI")), P("XX"));
}

TEST(Clifford, ForwardCzAddsZOnPartner) {
  EXPECT_EQ(conjugate_forward(tab(2, "CZ 0 1"), P("XI")), P("XZ"));
  EXPECT_EQ(conjugate_forward(tab(2, "CZ 0 1"), P("IX")), P("ZX"));
}

TEST(Clifford, IdentityTableauFixesEveryPauli) {
  const CliffordTableau id = CliffordTableau::identity(3);
  for (const auto& p : enumerate_paulis(3)) {
    EXPECT_EQ(conjugate_forward(id, p), p);
    EXPECT_EQ(conjugate_backward(id, p), p);
  }
}

TEST(Clifford, BackwardCxUndoesSpread) {
  const CliffordTableau t = tab(2, "CX 0 1");
  EXPECT_EQ(conjugate_backward(t, P("XX")), P("XI"));
  const qtest::Mat u = oracle_unitary(CliffordCircuit::from_text(2, "CX 0 1"));
  const qtest::Mat lhs = u.adjoint() * qtest::oracle_pauli(P("XX")) * u;
  EXPECT_LT(qtest::max_abs(lhs - qtest::oracle_pauli(P("XI"))), 1e-14);
}

TEST(Clifford, TableauFromCircuitExamples) {
  EXPECT_EQ(tableau_from_circuit(CliffordCircuit(3)), CliffordTableau::identity(3));
  const CliffordTableau h = tab(1, "H 0");
  EXPECT_EQ(h.image_x()[0], P("Z"));
  EXPECT_EQ(h.image_z()[0], P("X"));
  EXPECT_EQ(tab(2, "CX 0 1\nCX 0 1"), CliffordTableau::identity(2));
}

TEST(Clifford, BrickworkExamples) {
  EXPECT_EQ(brickwork_circuit(2, 1), CliffordCircuit::from_text(2, "CX 0 1"));
  EXPECT_EQ(brickwork_circuit(4, 2), CliffordCircuit::from_text(4, "CX 0 1\nCX 2 3\nCX 1 2"));
  for (std::size_t d = 1; d <= 10; ++d) {
    std::size_t expected = 0;
    for (std::size_t l = 0; l < d; ++l) expected += l % 2 == 0 ? 6 : 5;
    EXPECT_EQ(brickwork_circuit(12, d).size(), expected);
  }
  const CliffordCircuit bw = brickwork_circuit(7, 9);
  for (const Gate& g : bw.gates()) {
    EXPECT_EQ(g.kind, GateKind::CX);
    EXPECT_EQ(g.q1, g.q0 + 1);
  }
  EXPECT_THROW(brickwork_circuit(1, 3), std::invalid_argument);
  EXPECT_THROW(brickwork_circuit(4, 0), std::invalid_argument);
}

TEST(Clifford, TextRoundTripAndValidation) {
  const CliffordCircuit c = random_clifford_circuit(5, 100, 11);
  EXPECT_EQ(CliffordCircuit::from_text(5, c.str()), c);
  EXPECT_EQ(CliffordCircuit::from_text(2, "# comment\nCNOT 0 1\n\nH 1 # trailing"),
            CliffordCircuit::from_text(2, "CX 0 1\nH 1"));
  EXPECT_THROW(CliffordCircuit::from_text(2, "CX 0 0"), std::invalid_argument);
  EXPECT_THROW(CliffordCircuit::from_text(2, "CX 0 2"), std::out_of_range);
  EXPECT_THROW(CliffordCircuit::from_text(2, "T 0"), std::invalid_argument);
  EXPECT_THROW(CliffordCircuit::from_text(2, "H"), std::invalid_argument);
}

TEST(Clifford, RandomCircuitIsSeedDeterministic) {
  EXPECT_EQ(random_clifford_circuit(4, 80, 5), random_clifford_circuit(4, 80, 5));
  EXPECT_NE(random_clifford_circuit(4, 80, 5), random_clifford_circuit(4, 80, 6));
}

TEST(CliffordProperty, ApplyGateMatchesUnitaryConjugation) {
  for (GateKind k : {GateKind::H, GateKind::S, GateKind::SDG, GateKind::X, GateKind::Y, GateKind::Z,
                     GateKind::CX, GateKind::CY, GateKind::CZ}) {
    for (auto [q0, q1] : {std::pair<uint32_t, uint32_t>{0, 1}, {1, 0}, {2, 0}}) {
      const Gate g{k, q0, is_two_qubit(k) ? q1 : 0};
      const qtest::Mat u = qtest::oracle_gate(g, 3);
      for (const auto& p0 : enumerate_paulis(3)) {
        for (unsigned ph = 0; ph < 4; ++ph) {
          PauliString p = p0;
          p.set_phase_exp(p.phase_exp() + ph);
          PauliString q = p;
          apply_gate(g, q);
          const qtest::Mat expect = u * qtest::oracle_pauli(p) * u.adjoint();
          EXPECT_LT(qtest::max_abs(qtest::oracle_pauli(q) - expect), 1e-12)
              << gate_name(k) << " " << p.str();
        }
      }
    }
  }
}

TEST(CliffordProperty, TableauMatchesDenseConjugation) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const CliffordCircuit c = random_clifford_circuit(n, 20 * n, seed);
    const CliffordTableau t = tableau_from_circuit(c);
    const qtest::Mat u = oracle_unitary(c);
    for (const auto& p : enumerate_paulis(n)) {
      const qtest::Mat mp = qtest::oracle_pauli(p);
      EXPECT_LT(qtest::max_abs(qtest::oracle_pauli(t.forward(p)) - u * mp * u.adjoint()), 1e-10);
      EXPECT_LT(qtest::max_abs(qtest::oracle_pauli(t.backward(p)) - u.adjoint() * mp * u), 1e-10);
    }
  }
}

TEST(CliffordProperty, NormalizerKeepsHermitianPaulis) {
  const auto all = enumerate_paulis(3);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const CliffordTableau t = tableau_from_circuit(random_clifford_circuit(3, 60, 1000 + seed));
    for (const auto& p : all) {
      const PauliString f = conjugate_forward(t, p);
      EXPECT_TRUE(f.sign_exponent() == 0 || f.sign_exponent() == 2);
      EXPECT_EQ(weight(f) == 0, weight(p) == 0);
    }
  }
}

TEST(CliffordProperty, BackwardInvertsForwardExhaustive) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const CliffordTableau t = tableau_from_circuit(random_clifford_circuit(n, 20 * n, seed));
      for (const auto& p : enumerate_paulis(n)) {
        EXPECT_EQ(conjugate_backward(t, conjugate_forward(t, p)), p);
        EXPECT_EQ(conjugate_forward(t, conjugate_backward(t, p)), p);
      }
    }
  }
}

TEST(CliffordProperty, ImagesPreserveCommutationRelations) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 20;
    const CliffordTableau t = tableau_from_circuit(random_clifford_circuit(n, 20 * n, seed));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_TRUE(commutes(t.image_x()[i], t.image_x()[j]));
        EXPECT_TRUE(commutes(t.image_z()[i], t.image_z()[j]));
        EXPECT_EQ(commutes(t.image_x()[i], t.image_z()[j]), i != j);
      }
    }
  }
}

TEST(CliffordProperty, ComposeWithInverseIsIdentity) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const CliffordCircuit c = random_clifford_circuit(n, 20 * n, seed);
    const CliffordTableau t = tableau_from_circuit(c);
    EXPECT_EQ(compose(t, t.inverse()), CliffordTableau::identity(n));
    EXPECT_EQ(compose(t.inverse(), t), CliffordTableau::identity(n));
    EXPECT_EQ(tableau_from_circuit(c.inverse()), t.inverse());
  }
}

TEST(CliffordProperty, ComposeMatchesConcatenation) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const CliffordCircuit a = random_clifford_circuit(n, 20 * n, seed);
    const CliffordCircuit b = random_clifford_circuit(n, 20 * n, seed + 500);
    CliffordCircuit ab = a;
    for (const Gate& g : b.gates()) ab.append(g);
    const CliffordTableau ta = tableau_from_circuit(a), tb = tableau_from_circuit(b);
    EXPECT_EQ(compose(tb, ta), tableau_from_circuit(ab));
    EXPECT_EQ(tb.then_after(ta), tableau_from_circuit(ab));
  }
}

TEST(Clifford, FromImagesRejectsInvalidImages) {
  EXPECT_THROW(CliffordTableau::from_images({P("X"), P("X")}, {P("Z"), P("Z")}),
               std::invalid_argument);
  EXPECT_THROW(CliffordTableau::from_images({P("Z")}, {P("Z")}), std::invalid_argument);
  EXPECT_THROW(CliffordTableau::from_images({P("iX")}, {P("Z")}), std::invalid_argument);
  EXPECT_NO_THROW(CliffordTableau::from_images({P("-Y")}, {P("Z")}));
}

TEST(Clifford, DimensionMismatchThrows) {
  EXPECT_THROW(conjugate_forward(CliffordTableau::identity(2), P("X")), std::invalid_argument);
  EXPECT_THROW(conjugate_backward(CliffordTableau::identity(2), P("XXX")), std::invalid_argument);
}
