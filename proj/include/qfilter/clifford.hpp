#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qfilter/pauli.hpp"

namespace qfilter {

enum class GateKind : uint8_t { H, S, SDG, X, Y, Z, CX, CY, CZ };

bool is_two_qubit(GateKind kind);
std::string_view gate_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);
GateKind inverse_kind(GateKind kind);

struct Gate {
  GateKind kind = GateKind::H;
  uint32_t q0 = 0;
  uint32_t q1 = 0;  // target for CX/CY, second operand for CZ; unused otherwise

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Conjugates `p` in place by the gate: p <- G p G^dagger, with exact phase.
void apply_gate(const Gate& gate, PauliString& p);

/// Ordered list of Clifford gates on a fixed register.
class CliffordCircuit {
 public:
  CliffordCircuit() = default;
  explicit CliffordCircuit(std::size_t n_qubits) : n_(n_qubits) {}

  /// One gate per line ("CX 0 1", "H 3"); '#' starts a comment.
  static CliffordCircuit from_text(std::size_t n_qubits, std::string_view text);
  std::string str() const;

  void append(const Gate& gate);
  void append(GateKind kind, uint32_t q0, uint32_t q1 = 0) { append(Gate{kind, q0, q1}); }

  std::size_t n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  CliffordCircuit inverse() const;

  friend bool operator==(const CliffordCircuit&, const CliffordCircuit&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Gate> gates_;
};

/// A Clifford map C stored as the images C X_j C^dag and C Z_j C^dag.
/// Images of the inverse map are cached so both conjugation directions cost
/// O(n * weight).
class CliffordTableau {
 public:
  CliffordTableau() = default;
  static CliffordTableau identity(std::size_t n_qubits);
  /// Builds a tableau from generator images; throws if they do not satisfy
  /// the Pauli commutation relations or are not Hermitian.
  static CliffordTableau from_images(std::vector<PauliString> image_x,
                                     std::vector<PauliString> image_z);

  std::size_t n_qubits() const { return n_; }
  const std::vector<PauliString>& image_x() const { return image_x_; }
  const std::vector<PauliString>& image_z() const { return image_z_; }

  /// C p C^dag
  PauliString forward(const PauliString& p) const;
  /// C^dag p C
  PauliString backward(const PauliString& p) const;

  CliffordTableau inverse() const;
  /// Tableau of `this` applied after `first`, i.e. the map C_this * C_first.
  CliffordTableau then_after(const CliffordTableau& first) const;

  friend bool operator==(const CliffordTableau& a, const CliffordTableau& b) {
    return a.n_ == b.n_ && a.image_x_ == b.image_x_ && a.image_z_ == b.image_z_;
  }

 private:
  static PauliString apply_images(const std::vector<PauliString>& ix,
                                  const std::vector<PauliString>& iz, const PauliString& p);
  void compute_inverse();

  std::size_t n_ = 0;
  std::vector<PauliString> image_x_, image_z_;
  std::vector<PauliString> inverse_x_, inverse_z_;
};

PauliString conjugate_forward(const CliffordTableau& c, const PauliString& p);
PauliString conjugate_backward(const CliffordTableau& c, const PauliString& p);
CliffordTableau tableau_from_circuit(const CliffordCircuit& circ);
/// compose(second, first): the Clifford that applies `first` and then `second`.
CliffordTableau compose(const CliffordTableau& second, const CliffordTableau& first);

/// Alternating CX layers: odd layers pair (0,1),(2,3),..., even layers pair
/// (1,2),(3,4),...; the lower index is the control.
CliffordCircuit brickwork_circuit(std::size_t n, std::size_t depth);

/// Uniformly random gate sequence over the gate library (not Haar random).
CliffordCircuit random_clifford_circuit(std::size_t n, std::size_t n_gates, uint64_t seed);

}  // namespace qfilter
