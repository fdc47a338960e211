#include <gtest/gtest.h>

#include "qfilter/channel.hpp"
#include "qfilter/dense.hpp"
#include "test_util.hpp"

using namespace qfilter;

namespace {

PauliString P(const char* s) { return PauliString::from_text(s); }

void expect_valid(const PauliChannel& ch) {
  double total = 0.0;
  for (const auto& [p, v] : ch.probs()) {
    EXPECT_GE(v, 0.0);
    EXPECT_EQ(p.n_qubits(), ch.n_qubits());
    EXPECT_EQ(p.sign_exponent(), 0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

/// sum_P p_P P rho P with textbook matrices.
qtest::Mat oracle_apply(const PauliChannel& ch, const qtest::Mat& rho) {
  qtest::Mat out = qtest::Mat::Zero(rho.rows(), rho.cols());
  for (const auto& [p, v] : ch.probs()) {
    const qtest::Mat m = qtest::oracle_pauli(p);
    out += v * m * rho * m.adjoint();
  }
  return out;
}

qtest::Mat random_state(std::size_t n, std::mt19937_64& rng) {
  const std::size_t d = std::size_t{1} << n;
  std::normal_distribution<double> g;
  qtest::Mat a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = qtest::cplx(g(rng), g(rng));
  }
  qtest::Mat rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST(Channel, DepolarizingExamples) {
  EXPECT_EQ(depolarizing(1, 0.0), PauliChannel::identity(1));
  const PauliChannel d = depolarizing(1, 0.3);
  EXPECT_DOUBLE_EQ(d.prob(P("I")), 0.7);
  EXPECT_DOUBLE_EQ(d.prob(P("X")), 0.1);
  EXPECT_DOUBLE_EQ(d.prob(P("Y")), 0.1);
  EXPECT_DOUBLE_EQ(d.prob(P("Z")), 0.1);
  for (double p : {0.01, 0.2, 0.5}) {
    EXPECT_NEAR(depolarizing(2, p).prob(P("II")), (1 - p) * (1 - p), 1e-15);
    EXPECT_NEAR(depolarizing(2, p).prob(P("XZ")), p * p / 9, 1e-15);
  }
  EXPECT_THROW(depolarizing(1, -0.1), std::invalid_argument);
  EXPECT_THROW(depolarizing(1, 1.1), std::invalid_argument);
}

TEST(Channel, FidelityExamples) {
  EXPECT_EQ(fidelity(PauliChannel::identity(3)), 1.0);
  EXPECT_DOUBLE_EQ(fidelity(depolarizing(1, 0.3)), 0.7);
  EXPECT_NEAR(fidelity(depolarizing(4, 0.01)), 0.96059601, 1e-12);
  EXPECT_NEAR(infidelity(depolarizing(4, 0.01)), 1 - 0.96059601, 1e-12);
}

TEST(Channel, AverageFidelityConversion) {
  for (double p : {0.0, 0.01, 0.3}) {
    EXPECT_NEAR(average_fidelity(fidelity(depolarizing(1, p)), 1), 1 - 2 * p / 3, 1e-15);
  }
}

TEST(Channel, ComposeExamples) {
  std::mt19937_64 rng(5);
  const PauliChannel ch = qtest::random_pauli_channel(2, 6, rng);
  EXPECT_EQ(compose(PauliChannel::identity(2), ch), ch);
  for (double q : {0.1, 0.25, 0.4}) {
    const PauliChannel flip = PauliChannel::from_probs(1, {{P("I"), 1 - q}, {P("X"), q}});
    const PauliChannel c = compose(flip, flip);
    EXPECT_NEAR(c.prob(P("I")), 1 - 2 * q + 2 * q * q, 1e-15);
    EXPECT_NEAR(c.prob(P("X")), 2 * q * (1 - q), 1e-15);
  }
  EXPECT_THROW(compose(PauliChannel::identity(1), PauliChannel::identity(2)),
               std::invalid_argument);
}

TEST(Channel, ConjugateChannelExamples) {
  const PauliChannel d = depolarizing(2, 0.1);
  EXPECT_EQ(conjugate_channel(CliffordTableau::identity(2), d), d);
  const CliffordTableau h = tableau_from_circuit(CliffordCircuit::from_text(2, "H 0\nH 1"));
  const PauliChannel hd = conjugate_channel(h, d);
  for (const auto& [p, v] : d.probs()) EXPECT_NEAR(hd.prob(p), v, 1e-15);
  const CliffordTableau cx = tableau_from_circuit(CliffordCircuit::from_text(2, "CX 0 1"));
  const PauliChannel xi = PauliChannel::from_probs(2, {{P("XI"), 1.0}});
  EXPECT_EQ(conjugate_channel(cx, xi), PauliChannel::from_probs(2, {{P("XX"), 1.0}}));
}

TEST(Channel, ValidationRejectsBadInput) {
  EXPECT_THROW(PauliChannel::from_probs(1, {{P("I"), 0.5}}), std::invalid_argument);
  EXPECT_THROW(PauliChannel::from_probs(1, {{P("I"), 1.5}, {P("X"), -0.5}}),
               std::invalid_argument);
  EXPECT_THROW(PauliChannel::from_probs(1, {{P("II"), 1.0}}), std::invalid_argument);
  EXPECT_NO_THROW(PauliChannel::from_probs(1, {{P("I"), 0.5 + 1e-13}, {P("X"), 0.5}}));
  // Phases are dropped from keys.
  EXPECT_EQ(PauliChannel::from_probs(1, {{P("-Y"), 1.0}}).prob(P("Y")), 1.0);
}

TEST(Channel, NormalizedReportsTotal) {
  double total = 0.0;
  const PauliChannel c =
      PauliChannel::normalized(1, {{P("I"), 0.3}, {P("Z"), 0.1}, {P("X"), 0.0}}, &total);
  EXPECT_NEAR(total, 0.4, 1e-15);
  EXPECT_NEAR(c.prob(P("I")), 0.75, 1e-15);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_TRUE(PauliChannel::normalized(1, {{P("X"), 0.0}}).empty());
}

TEST(Channel, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const PauliChannel ch = qtest::random_pauli_channel(1 + t % 5, 1 + t % 12, rng);
    const nlohmann::json j = channel_to_json(ch);
    EXPECT_EQ(j.at("n").get<std::size_t>(), ch.n_qubits());
    EXPECT_EQ(channel_from_json(nlohmann::json::parse(j.dump())), ch);
  }
  const nlohmann::json j = {{"n", 2}, {"probs", {{"XI", 0.25}, {"II", 0.75}}}};
  EXPECT_DOUBLE_EQ(channel_from_json(j).prob(P("XI")), 0.25);
  EXPECT_THROW(channel_from_json({{"n", 1}, {"probs", {{"-X", 1.0}}}}), std::invalid_argument);
  EXPECT_THROW(channel_from_json({{"probs", {{"X", 1.0}}}}), std::invalid_argument);
}

TEST(ChannelProperty, OutputsAreValidChannels) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 4;
    const PauliChannel a = qtest::random_pauli_channel(n, 1 + t % 9, rng);
    const PauliChannel b = qtest::random_pauli_channel(n, 1 + t % 7, rng);
    expect_valid(a);
    expect_valid(compose(a, b));
    expect_valid(tensor(a, b));
    const CliffordTableau c = tableau_from_circuit(random_clifford_circuit(n, 20 * n, t));
    const PauliChannel ca = conjugate_channel(c, a);
    expect_valid(ca);
    EXPECT_NEAR(fidelity(ca), fidelity(a), 1e-15);
    EXPECT_NEAR(fidelity(compose(a, b)), fidelity(compose(b, a)), 1e-15);
  }
  expect_valid(product_channel(5, {0.9, 0.05, 0.03, 0.02}));
  expect_valid(depolarizing(6, 0.2));
}

TEST(ChannelProperty, ProductChannelMatchesTensorPower) {
  const Pauli1Probs q{0.85, 0.05, 0.04, 0.06};
  const PauliChannel one = product_channel(1, q);
  PauliChannel acc = one;
  for (std::size_t n = 2; n <= 4; ++n) {
    acc = tensor(acc, one);
    const PauliChannel direct = product_channel(n, q);
    ASSERT_EQ(acc.size(), direct.size());
    for (const auto& [p, v] : direct.probs()) EXPECT_NEAR(acc.prob(p), v, 1e-15);
  }
}

TEST(Dense, IdentityAndFullDepolarizing) {
  std::mt19937_64 rng(3);
  const qtest::Mat rho = random_state(2, rng);
  EXPECT_LT(qtest::max_abs(dense_apply(DenseChannel::identity(2), rho) - rho), 1e-15);
  qtest::Mat psi = qtest::Mat::Zero(2, 1);
  psi(0) = std::cos(0.4);
  psi(1) = qtest::cplx(0, std::sin(0.4));
  const qtest::Mat pure = psi * psi.adjoint();
  const qtest::Mat out = dense_apply(dense_from_pauli(depolarizing(1, 0.75)), pure);
  EXPECT_LT(qtest::max_abs(out - qtest::Mat::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Dense, XConjugationMatchesPauliChannel) {
  const DenseChannel xd = DenseChannel::unitary(qtest::pauli2('X'));
  const PauliChannel xp = PauliChannel::from_probs(1, {{P("X"), 1.0}});
  EXPECT_LT(channel_distance(xd, dense_from_pauli(xp)), 1e-15);
  EXPECT_GT(channel_distance(xd, DenseChannel::identity(1)), 1.0);
}

TEST(Dense, ValidationAndLimits) {
  qtest::Mat half = qtest::Mat::Identity(2, 2) * 0.5;
  EXPECT_THROW(DenseChannel(1, {half}), std::invalid_argument);
  EXPECT_NO_THROW(DenseChannel(1, {half}, false));
  EXPECT_THROW(DenseChannel::identity(kMaxDenseChannelQubits + 1), std::invalid_argument);
  EXPECT_THROW(DenseChannel(1, {qtest::Mat::Identity(4, 4)}), std::invalid_argument);
}

TEST(DenseProperty, PauliPathMatchesOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 2;
    const PauliChannel a = qtest::random_pauli_channel(n, 1 + t % 10, rng);
    const PauliChannel b = qtest::random_pauli_channel(n, 1 + t % 6, rng);
    const qtest::Mat rho = random_state(n, rng);
    const qtest::Mat ref = oracle_apply(a, rho);
    EXPECT_LT(qtest::max_abs(dense_apply(dense_from_pauli(a), rho) - ref), 1e-12);
    EXPECT_LT(qtest::max_abs(superop(a).apply(rho) - ref), 1e-12);
    // compose, tensor and conjugation against their dense counterparts
    EXPECT_LT(channel_distance(superop(compose(a, b)), then(superop(b), superop(a))), 1e-10);
    const CliffordCircuit circ = random_clifford_circuit(n, 20 * n, t);
    const qtest::Mat u = circuit_unitary(circ);
    const Superoperator uu = superop_from_kraus(n, {u});
    const Superoperator lhs = superop(conjugate_channel(tableau_from_circuit(circ), a));
    const Superoperator udag = superop_from_kraus(n, {u.adjoint()});
    EXPECT_LT(channel_distance(lhs, then(then(udag, superop(a)), uu)), 1e-10);
    const PauliChannel c1 = qtest::random_pauli_channel(1, 4, rng);
    const qtest::Mat rho3 = random_state(n + 1, rng);
    EXPECT_LT(qtest::max_abs(superop(tensor(a, c1)).apply(rho3) - oracle_apply(tensor(a, c1), rho3)),
              1e-12);
  }
}

TEST(DenseProperty, PauliWeightsRecoverPauliChannels) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 3;
    const PauliChannel a = qtest::random_pauli_channel(n, 1 + t % 12, rng);
    const PauliChannel back = pauli_channel_of(superop(a));
    for (const auto& p : enumerate_paulis(n)) EXPECT_NEAR(back.prob(p), a.prob(p), 1e-12);
  }
}

TEST(DenseProperty, PauliTwirlOfRotation) {
  // exp(i t X) twirls to {I: cos^2 t, X: sin^2 t}.
  for (double th : {0.1, 0.7, 1.3}) {
    const PauliChannel tw = pauli_channel_of(superop(DenseChannel::unitary(x_rotation(th))));
    EXPECT_NEAR(tw.prob(P("I")), std::cos(th) * std::cos(th), 1e-14);
    EXPECT_NEAR(tw.prob(P("X")), std::sin(th) * std::sin(th), 1e-14);
  }
}

TEST(DenseProperty, RandomChannelsAreTracePreserving) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const DenseChannel ch = random_dense_channel(n, 1 + seed % 4, seed);
    const std::size_t d = std::size_t{1} << n;
    qtest::Mat s = qtest::Mat::Zero(d, d);
    for (const auto& k : ch.kraus()) s += k.adjoint() * k;
    EXPECT_LT(qtest::max_abs(s - qtest::Mat::Identity(d, d)), 1e-12);
    std::mt19937_64 rng(seed);
    const qtest::Mat rho = random_state(n, rng);
    EXPECT_NEAR(std::abs(dense_apply(ch, rho).trace()), 1.0, 1e-12);
    EXPECT_LT(qtest::max_abs(superop(ch).apply(rho) - dense_apply(ch, rho)), 1e-12);
  }
}
