#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qfilter/channel.hpp"
#include "qfilter/clifford.hpp"
#include "qfilter/dense.hpp"
#include "qfilter/pauli.hpp"

namespace qfilter {

/// Independent depolarizing noise of strength `rate` on each listed qubit.
struct FaultSite {
  std::vector<uint32_t> qubits;
  double rate = 0.0;
  std::string label;
};

/// Correlated Pauli channel on the listed qubits (channel qubit i <-> qubits[i]).
struct PauliNoise {
  std::vector<uint32_t> qubits;
  PauliChannel channel;
};

/// General Kraus channel; dense oracle only.
struct KrausNoise {
  std::vector<uint32_t> qubits;
  std::vector<Matrix> kraus;
};

/// Non-Clifford unitary; dense oracle only.
struct DenseUnitary {
  std::vector<uint32_t> qubits;
  Matrix u;
  std::string name;
};

/// X-basis measurement of one qubit; outcome 0 for the +1 eigenvalue.
struct MeasureX {
  uint32_t qubit = 0;
  std::string bit;
};

/// Applies `pauli` (on the full register) when `bit` reads 1.
struct ConditionalPauli {
  std::string bit;
  PauliString pauli;
};

using Element =
    std::variant<Gate, FaultSite, PauliNoise, KrausNoise, DenseUnitary, MeasureX, ConditionalPauli>;

/// Channel placed on system qubits by the filter circuit builders: a
/// depolarizing rate, a Pauli channel, or a Kraus set.
using LocalChannel = std::variant<double, PauliChannel, std::vector<Matrix>>;

/// Register layout: system qubits 0..n_system-1, then the ancillas.
class NoisyCircuit {
 public:
  NoisyCircuit(std::size_t n_system, std::size_t n_ancilla);

  std::size_t n_system() const { return n_system_; }
  std::size_t n_ancilla() const { return n_ancilla_; }
  std::size_t n_qubits() const { return n_system_ + n_ancilla_; }
  uint32_t ancilla(std::size_t k) const;

  void add(Element e);
  void add_gate(GateKind kind, uint32_t q0, uint32_t q1 = 0);
  /// Two-qubit gate followed by depolarizing faults on control (pc) and target (pt).
  void add_noisy_gate(GateKind kind, uint32_t control, uint32_t target, double pc, double pt);
  /// Skipped when rate is 0 and no label is given.
  void add_fault(std::vector<uint32_t> qubits, double rate, std::string label = "");
  void add_channel(const std::vector<uint32_t>& qubits, const LocalChannel& ch);
  /// Controlled-P from `control`, one controlled single-qubit gate per
  /// support qubit in ascending order, plus Z on the control for a -1 sign.
  void add_controlled_pauli(uint32_t control, const PauliString& p, double pc, double pt);
  void measure_x(uint32_t qubit, std::string bit);
  void conditional(std::string bit, PauliString pauli);
  void postselect(const std::string& bit);

  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<std::string>& measurement_bits() const { return bits_; }
  const std::vector<std::string>& postselected() const { return postselect_; }
  std::size_t bit_index(const std::string& bit) const;
  /// False if the circuit holds Kraus noise or non-Clifford unitaries.
  bool pauli_frame_compatible() const;
  std::size_t count_faults() const;

 private:
  std::size_t n_system_, n_ancilla_;
  std::vector<Element> elements_;
  std::vector<std::string> bits_;
  std::vector<std::string> postselect_;
};

// ---------------------------------------------------------------------------
// Circuit builders

/// Noisy two-qubit gate rates of the correction filter and the corrected
/// channel (depolarizing on every system qubit).
struct CorrectionFilterNoise {
  double pc = 0.0;
  double pt = 0.0;
  LocalChannel channel = 0.05;
};

/// Per-qubit X and Z correction filters with deferred measurements. For
/// system qubit j the X-filter ancilla is n + 2j and the Z-filter ancilla
/// n + 2j + 1; bits "z<j>" and "x<j>" drive X and Z corrections.
NoisyCircuit build_correction_filter_circuit(std::size_t n, const CorrectionFilterNoise& noise);

enum class FilterAxis { Z, X };

/// Single-qubit Z or X correction filter unitary with the coherent correction
/// and labeled fault locations "A" (ancilla) and "B" (system) before the
/// channel slot, "C" and "D" after it. System qubit 0, ancilla 1; no
/// measurement.
NoisyCircuit build_fault_location_circuit(FilterAxis axis);

struct AeFilterNoise {
  double pc_filter = 0.0;
  double pt_filter = 0.0;
  double pc_circuit = 0.0;
  double pt_circuit = 0.0;
  /// Depolarizing rate on both ancillas after every layer of the circuit.
  double idle_ancilla = 0.0;
};

/// Ancilla-efficient filter around `circ`: ancilla n selects Z^n, ancilla
/// n + 1 selects X^n; backward-propagated selects before the circuit, plain
/// ones after; both ancillas post-selected on 0 ("a_z", "a_x").
NoisyCircuit build_ae_filter_circuit(const CliffordCircuit& circ, const AeFilterNoise& noise,
                                     const std::optional<LocalChannel>& channel_after = std::nullopt);
/// The circuit alone with noisy two-qubit gates.
NoisyCircuit build_noisy_circuit(const CliffordCircuit& circ, double pc, double pt,
                                 const std::optional<LocalChannel>& channel_after = std::nullopt);

/// One ancilla per probe (bit "m<k>"), probe 0 innermost, around `channel`
/// on all system qubits.
NoisyCircuit build_commutation_filter_circuit(const std::vector<PauliString>& probes,
                                              const LocalChannel& channel, double pc = 0.0,
                                              double pt = 0.0);

/// Z-filter around a T gate followed by the Pauli noise `noise`, with X (or
/// Y) feedback. With `undo_t` a leading T^dag cancels the ideal gate.
NoisyCircuit build_t_filter_circuit(const Pauli1Probs& noise, bool y_feedback = false,
                                    bool undo_t = true);
/// Three single-qubit Z-filters around a CCZ gate followed by local noise.
NoisyCircuit build_ccz_filter_circuit(const Pauli1Probs& noise, bool undo_ccz = true);

// ---------------------------------------------------------------------------
// Fault propagation and sampling

struct FaultPropagation {
  PauliString residual;     // phase-free frame on the full register
  std::vector<bool> flips;  // one per measurement, in order
};

/// Pushes `fault` (full register) forward from just after element `site`.
FaultPropagation propagate_fault(const NoisyCircuit& circ, std::size_t site,
                                 const PauliString& fault);

struct SimResult {
  uint64_t shots = 0;
  uint64_t accepted = 0;
  uint64_t identity_residual = 0;
  uint64_t seed = 0;

  double fidelity_estimate() const;
  double postselect_rate() const;
  double fidelity_stderr() const;
  double postselect_stderr() const;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Worker count from QFILTER_THREADS, else the hardware concurrency.
std::size_t default_thread_count();

/// Pauli-frame Monte Carlo. Results depend only on (circuit, shots, seed):
/// every shot draws from its own streams keyed by (seed, shot, group).
SimResult monte_carlo(const NoisyCircuit& circ, uint64_t shots, uint64_t seed,
                      std::size_t threads = 0);

struct DenseRunResult {
  std::size_t n_system = 0;
  /// Outcome string (one char per measurement) -> unnormalized system map.
  std::map<std::string, Superoperator> branches;
  /// Branch probabilities for the maximally mixed system input.
  std::map<std::string, double> branch_probabilities;
  /// Sum of the post-selected branches.
  Superoperator accepted;
  double accept_probability = 0.0;

  /// accepted / accept_probability
  Superoperator channel() const;
  /// Branch map normalized by its probability.
  Superoperator branch_channel(const std::string& outcome) const;
};

/// Exact density-matrix evolution with measurement branching, at most
/// kMaxDenseQubits qubits in total and kMaxDenseChannelQubits system qubits.
DenseRunResult dense_oracle_run(const NoisyCircuit& circ);

}  // namespace qfilter
