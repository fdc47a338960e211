#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "qfilter/analytics.hpp"
#include "qfilter/filters.hpp"
#include "qfilter/noisy_sim.hpp"
#include "test_util.hpp"

using namespace qfilter;

namespace {

PauliString P(const char* s) { return PauliString::from_text(s); }

struct Exact {
  double fidelity;
  double accept;
};

// Dense fidelity of the noise left after undoing the ideal circuit.
Exact dense_exact(const NoisyCircuit& c, const CliffordCircuit* ideal = nullptr) {
  const DenseRunResult r = dense_oracle_run(c);
  Superoperator s = r.channel();
  if (ideal != nullptr) {
    s = then(s, superop_from_kraus(ideal->n_qubits(), {circuit_unitary(*ideal).adjoint()}));
  }
  return {pauli_channel_of(s).prob(PauliString(c.n_system())), r.accept_probability};
}

void expect_within(double estimate, double exact, double stderr_, double k, const char* what) {
  EXPECT_LE(std::fabs(estimate - exact), k * stderr_ + 1e-12)
      << what << ": estimate " << estimate << " exact " << exact << " stderr " << stderr_;
}

// Per-seed agreement within 4 sigma and pooled agreement within 3 sigma.
void check_against_exact(const NoisyCircuit& c, const Exact& ex, uint64_t shots) {
  uint64_t accepted = 0, identity = 0, total = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const SimResult r = monte_carlo(c, shots, seed);
    expect_within(r.fidelity_estimate(), ex.fidelity, r.fidelity_stderr(), 4, "fidelity");
    expect_within(r.postselect_rate(), ex.accept, r.postselect_stderr(), 4, "postselect");
    accepted += r.accepted;
    identity += r.identity_residual;
    total += r.shots;
  }
  const SimResult pooled{total, accepted, identity, 0};
  expect_within(pooled.fidelity_estimate(), ex.fidelity, pooled.fidelity_stderr(), 3, "pooled fidelity");
  expect_within(pooled.postselect_rate(), ex.accept, pooled.postselect_stderr(), 3, "pooled postselect");
}

qtest::Mat gates_unitary(const NoisyCircuit& c, std::size_t from) {
  const std::size_t d = std::size_t{1} << c.n_qubits();
  qtest::Mat u = qtest::Mat::Identity(d, d);
  for (std::size_t i = from; i < c.elements().size(); ++i) {
    if (const Gate* g = std::get_if<Gate>(&c.elements()[i])) u = qtest::oracle_gate(*g, c.n_qubits()) * u;
  }
  return u;
}

}  // namespace

TEST(NoisySimMonteCarlo, CorrectionCircuitMatchesDense) {
  for (std::size_t n : {1, 2}) {
    const NoisyCircuit c = build_correction_filter_circuit(n, {0.02, 0.03, 0.05});
    const Exact ex = dense_exact(c);
    EXPECT_NEAR(ex.accept, 1.0, 1e-12);
    check_against_exact(c, ex, 40000);
  }
}

TEST(NoisySimMonteCarlo, AeFilterMatchesDense) {
  const CliffordCircuit circ = brickwork_circuit(2, 3);
  const NoisyCircuit c = build_ae_filter_circuit(circ, {0.01, 0.02, 0.015, 0.03, 0.005});
  const Exact ex = dense_exact(c, &circ);
  EXPECT_LT(ex.accept, 1.0);
  check_against_exact(c, ex, 40000);
}

TEST(NoisySimMonteCarlo, AeFilterMatchesDenseWithChannel) {
  std::mt19937_64 rng(5);
  const CliffordCircuit circ = random_clifford_circuit(2, 12, 3);
  const PauliChannel ch = qtest::random_pauli_channel(2, 8, rng);
  const NoisyCircuit c = build_ae_filter_circuit(circ, {0.01, 0.01, 0.0, 0.0, 0.0}, LocalChannel(ch));
  check_against_exact(c, dense_exact(c, &circ), 40000);
}

TEST(NoisySimMonteCarlo, LargeAeFilterMatchesSymmetricEngine) {
  const std::size_t n = 12;
  const double p = 0.01;
  const NoisyCircuit c = build_ae_filter_circuit(CliffordCircuit(n), {}, LocalChannel(p));
  const auto s = symmetric_channel_engine(n, {1 - p, p / 3, p / 3, p / 3});
  check_against_exact(c, {s.output_fidelity, s.success_probability}, 40000);
}

TEST(NoisySimMonteCarlo, CorrectionFidelityIndependentOfChannelRate) {
  const double f1 = dense_exact(build_correction_filter_circuit(1, {0.01, 0.005, 0.05})).fidelity;
  const double f2 = dense_exact(build_correction_filter_circuit(1, {0.01, 0.005, 0.3})).fidelity;
  EXPECT_NEAR(f1, f2, 1e-12);
  const SimResult a = monte_carlo(build_correction_filter_circuit(4, {0.01, 0.005, 0.05}), 100000, 9);
  const SimResult b = monte_carlo(build_correction_filter_circuit(4, {0.01, 0.005, 0.5}), 100000, 9);
  const double sigma = std::hypot(a.fidelity_stderr(), b.fidelity_stderr());
  EXPECT_LE(std::fabs(a.fidelity_estimate() - b.fidelity_estimate()), 3 * sigma);
  EXPECT_NEAR(a.fidelity_estimate(), std::pow(f1, 4), 3 * a.fidelity_stderr());
}

TEST(NoisySimMonteCarlo, DeterministicAndThreadIndependent) {
  const NoisyCircuit c = build_ae_filter_circuit(brickwork_circuit(6, 4), {0.01, 0.01, 0.01, 0.01, 0.0});
  const SimResult a = monte_carlo(c, 20000, 42, 1);
  EXPECT_EQ(a, monte_carlo(c, 20000, 42, 1));
  EXPECT_EQ(a, monte_carlo(c, 20000, 42, 3));
  EXPECT_EQ(a, monte_carlo(c, 20000, 42, 7));
  EXPECT_NE(a, monte_carlo(c, 20000, 43, 1));
  EXPECT_EQ(a.seed, 42u);
}

TEST(NoisySimMonteCarlo, ResultInvariants) {
  const NoisyCircuit c = build_ae_filter_circuit(brickwork_circuit(4, 2), {0.05, 0.05, 0.05, 0.05, 0.0});
  const SimResult r = monte_carlo(c, 5000, 3);
  EXPECT_EQ(r.shots, 5000u);
  EXPECT_LE(r.accepted, r.shots);
  EXPECT_LE(r.identity_residual, r.accepted);
  const double f = r.fidelity_estimate();
  EXPECT_NEAR(r.fidelity_stderr(), std::sqrt(f * (1 - f) / double(r.accepted)), 1e-15);
  const double q = r.postselect_rate();
  EXPECT_NEAR(r.postselect_stderr(), std::sqrt(q * (1 - q) / 5000.0), 1e-15);
  EXPECT_DOUBLE_EQ(SimResult{}.fidelity_estimate(), 0.0);
  EXPECT_THROW(monte_carlo(c, 0, 1), std::invalid_argument);
}

TEST(NoisySimMonteCarlo, NoiselessCircuitIsPerfect) {
  const SimResult r = monte_carlo(build_ae_filter_circuit(brickwork_circuit(5, 3), {}), 1000, 1);
  EXPECT_EQ(r.accepted, 1000u);
  EXPECT_EQ(r.identity_residual, 1000u);
}

TEST(NoisySimMonteCarlo, RejectsDenseOnlyElements) {
  NoisyCircuit c(1, 0);
  c.add(DenseUnitary{{0}, t_gate(), "T"});
  EXPECT_FALSE(c.pauli_frame_compatible());
  EXPECT_THROW(monte_carlo(c, 100, 1), std::invalid_argument);
}

TEST(NoisySimMonteCarlo, ThreadCountFromEnvironment) {
  ::setenv("QFILTER_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3u);
  ::setenv("QFILTER_THREADS", "zero", 1);
  EXPECT_THROW(default_thread_count(), std::invalid_argument);
  ::unsetenv("QFILTER_THREADS");
  EXPECT_GE(default_thread_count(), 1u);
}

TEST(NoisySimPropagation, MatchesUnitaryConjugation) {
  for (FilterAxis axis : {FilterAxis::Z, FilterAxis::X}) {
    const NoisyCircuit c = build_fault_location_circuit(axis);
    for (std::size_t site = 0; site < c.elements().size(); ++site) {
      const qtest::Mat u = gates_unitary(c, site + 1);
      for (const auto& f : enumerate_paulis(2)) {
        const FaultPropagation fp = propagate_fault(c, site, f);
        EXPECT_TRUE(fp.flips.empty());
        const qtest::Mat expect = u * qtest::oracle_pauli(f) * u.adjoint();
        const qtest::Mat got = qtest::oracle_pauli(fp.residual);
        // Equal up to a global phase.
        const qtest::Mat prod = got.adjoint() * expect;
        EXPECT_LT(qtest::max_abs(prod - prod(0, 0) * qtest::Mat::Identity(4, 4)), 1e-12);
        EXPECT_NEAR(std::abs(prod(0, 0)), 1.0, 1e-12);
      }
    }
  }
}

TEST(NoisySimPropagation, FaultLocationsAreLabeled) {
  for (FilterAxis axis : {FilterAxis::Z, FilterAxis::X}) {
    std::vector<std::string> labels;
    for (const Element& e : build_fault_location_circuit(axis).elements()) {
      if (const FaultSite* f = std::get_if<FaultSite>(&e)) labels.push_back(f->label);
    }
    EXPECT_EQ(labels, (std::vector<std::string>{"A", "B", "C", "D"}));
  }
}

TEST(NoisySimPropagation, MeasurementFlipsAndConditionals) {
  NoisyCircuit c(1, 1);
  c.add_gate(GateKind::H, 1);
  c.measure_x(1, "m");
  c.conditional("m", P("XI"));
  const FaultPropagation z = propagate_fault(c, 0, P("IZ"));
  ASSERT_EQ(z.flips.size(), 1u);
  EXPECT_TRUE(z.flips[0]);
  EXPECT_TRUE(z.residual.x(0));
  const FaultPropagation x = propagate_fault(c, 0, P("IX"));
  EXPECT_FALSE(x.flips[0]);
  EXPECT_FALSE(x.residual.x(0));
  EXPECT_THROW(propagate_fault(c, 5, P("IZ")), std::out_of_range);
  EXPECT_THROW(propagate_fault(c, 0, P("Z")), std::invalid_argument);
}

TEST(NoisySimBuilders, Validation) {
  EXPECT_THROW(NoisyCircuit(0, 0), std::invalid_argument);
  NoisyCircuit c(2, 1);
  EXPECT_EQ(c.ancilla(0), 2u);
  EXPECT_THROW(c.ancilla(1), std::out_of_range);
  EXPECT_ANY_THROW(c.add_gate(GateKind::CX, 0, 3));
  EXPECT_ANY_THROW(c.add_gate(GateKind::CX, 1, 1));
  EXPECT_THROW(c.add_fault({0}, 1.5), std::invalid_argument);
  EXPECT_THROW(c.add_fault({0}, -0.1), std::invalid_argument);
  c.add_fault({0}, 0.0);
  EXPECT_EQ(c.count_faults(), 0u);
  c.add_fault({0, 1}, 0.1);
  EXPECT_GE(c.count_faults(), 1u);
  EXPECT_ANY_THROW(c.conditional("nope", P("XII")));
  EXPECT_ANY_THROW(c.postselect("nope"));
  c.measure_x(2, "a");
  EXPECT_ANY_THROW(c.measure_x(2, "a"));
  EXPECT_EQ(c.bit_index("a"), 0u);
  EXPECT_ANY_THROW(c.conditional("a", P("XI")));
}

TEST(NoisySimBuilders, CorrectionLayout) {
  const NoisyCircuit c = build_correction_filter_circuit(3, {});
  EXPECT_EQ(c.n_system(), 3u);
  EXPECT_EQ(c.n_ancilla(), 6u);
  EXPECT_EQ(c.measurement_bits().size(), 6u);
  EXPECT_TRUE(c.postselected().empty());
  const NoisyCircuit ae = build_ae_filter_circuit(brickwork_circuit(4, 2), {});
  EXPECT_EQ(ae.n_ancilla(), 2u);
  EXPECT_EQ(ae.postselected(), (std::vector<std::string>{"a_z", "a_x"}));
}

TEST(NoisySimDense, TGateFilterMatchesClosedForm) {
  const std::vector<Pauli1Probs> cases = {
      {0.97, 0.01, 0.01, 0.01}, {0.9, 0.1, 0.0, 0.0}, {0.85, 0.02, 0.1, 0.03}, {0.7, 0.1, 0.1, 0.1}};
  for (const auto& pr : cases) {
    for (bool yfb : {false, true}) {
      const DenseRunResult r = dense_oracle_run(build_t_filter_circuit(pr, yfb));
      EXPECT_NEAR(r.accept_probability, 1.0, 1e-12);
      const PauliChannel expect = yfb ? t_gate_purified_y_feedback(pr[1], pr[2], pr[3])
                                      : t_gate_purified(pr[1], pr[2], pr[3]);
      EXPECT_LT(channel_distance(r.channel(), superop(expect)), 1e-10);
    }
  }
  const DenseRunResult keep = dense_oracle_run(build_t_filter_circuit({1, 0, 0, 0}, false, false));
  EXPECT_LT(channel_distance(keep.channel(), superop_from_kraus(1, {t_gate()})), 1e-10);
}

TEST(NoisySimDense, CczFilterMatchesClosedForm) {
  for (double p : {0.0, 0.1, 0.3}) {
    const DenseRunResult r = dense_oracle_run(build_ccz_filter_circuit({1 - p, p / 3, p / 3, p / 3}));
    EXPECT_NEAR(pauli_channel_of(r.channel()).prob(PauliString(3)), ccz_purified_fidelity(p), 1e-10);
  }
}

TEST(NoisySimDense, RejectsOversizedRegisters) {
  EXPECT_ANY_THROW(dense_oracle_run(build_correction_filter_circuit(3, {})));
}
