#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qfilter/channel.hpp"
#include "qfilter/clifford.hpp"
#include "qfilter/pauli.hpp"

namespace qfilter {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense register size limits: Kraus channels and full-register simulation.
inline constexpr std::size_t kMaxDenseChannelQubits = 3;
inline constexpr std::size_t kMaxDenseQubits = 6;

// Basis convention: qubit q is bit q of the computational basis index.

/// Matrix of the operator i^phase X^x Z^z, including its phase.
Matrix pauli_matrix(const PauliString& p);
Matrix gate_matrix(GateKind kind);
/// Unitary of a Clifford circuit on its full register.
Matrix circuit_unitary(const CliffordCircuit& circ);
/// Embeds a k-qubit operator acting on `qubits` (local bit i <-> qubits[i]).
Matrix embed(const Matrix& op, const std::vector<uint32_t>& qubits, std::size_t n);

Matrix t_gate();
Matrix ccz_gate();
/// exp(i theta X)
Matrix x_rotation(double theta);

/// rho <- U rho U^dag for a local operator U on `qubits`, in O(4^n 2^k).
void apply_local(Matrix& rho, const Matrix& op, const std::vector<uint32_t>& qubits);
/// Left multiplication rho <- U rho only.
void apply_local_left(Matrix& rho, const Matrix& op, const std::vector<uint32_t>& qubits);

/// Channel given by Kraus operators on n <= 3 qubits.
class DenseChannel {
 public:
  DenseChannel() = default;
  /// Throws unless sum K^dag K = I within 1e-10 (or `trace_preserving` is false).
  DenseChannel(std::size_t n_qubits, std::vector<Matrix> kraus, bool trace_preserving = true);

  static DenseChannel identity(std::size_t n_qubits);
  static DenseChannel unitary(const Matrix& u);

  std::size_t n_qubits() const { return n_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

 private:
  std::size_t n_ = 0;
  std::vector<Matrix> kraus_;
};

DenseChannel dense_from_pauli(const PauliChannel& ch);
Matrix dense_apply(const DenseChannel& ch, const Matrix& rho);

/// Linear map on d x d matrices acting on column-stacked vec(rho), where
/// vec index = i + d * j for entry (i, j).
struct Superoperator {
  std::size_t n_qubits = 0;
  Matrix m;

  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  Matrix apply(const Matrix& rho) const;
  static Superoperator identity(std::size_t n_qubits);
};

Superoperator superop_from_kraus(std::size_t n_qubits, const std::vector<Matrix>& kraus);
Superoperator superop(const DenseChannel& ch);
Superoperator superop(const PauliChannel& ch);
/// Map that applies `first` and then `second`.
Superoperator then(const Superoperator& first, const Superoperator& second);

/// Max over the 4^n Pauli operator inputs of the Frobenius norm of the
/// output difference.
double channel_distance(const Superoperator& a, const Superoperator& b);
double channel_distance(const DenseChannel& a, const DenseChannel& b);

/// Diagonal of the Pauli process matrix: weight of each phase-free Pauli P,
/// (1/d^2) sum_ij <i| P^dag S(|i><j|) P |j>. Entries below `drop` are omitted.
PauliChannel::Map pauli_weights(const Superoperator& s, double drop = 0.0);
/// pauli_weights normalized into a channel (tiny negative round-off clipped).
PauliChannel pauli_channel_of(const Superoperator& s);

/// Random Kraus set with `n_kraus` elements: the blocks of a random isometry.
DenseChannel random_dense_channel(std::size_t n_qubits, std::size_t n_kraus, uint64_t seed);

}  // namespace qfilter
