#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>

#include <json.hpp>

#include "qfilter/clifford.hpp"
#include "qfilter/pauli.hpp"

namespace qfilter {

/// Absolute tolerance on the total probability of a channel.
inline constexpr double kNormTolerance = 1e-12;

/// Stochastic Pauli channel sum_P p_P P . P over phase-free Pauli labels.
///
/// A channel with no components is used as the marker for a branch that
/// occurs with probability zero; every other channel is normalized.
class PauliChannel {
 public:
  using Map = std::map<PauliString, double, PauliLess>;

  PauliChannel() = default;
  /// Empty channel on n qubits (the zero-probability branch marker).
  explicit PauliChannel(std::size_t n_qubits) : n_(n_qubits) {}

  static PauliChannel identity(std::size_t n_qubits);
  /// Validates and stores `probs`: keys are made phase-free, zero entries are
  /// dropped, every value must be >= 0 and the total must be 1 within
  /// kNormTolerance.
  static PauliChannel from_probs(std::size_t n_qubits, const Map& probs);
  /// Divides `weights` by their total (accumulated in long double) and returns
  /// the normalized channel; an all-zero input yields the empty marker.
  static PauliChannel normalized(std::size_t n_qubits, const Map& weights, double* total = nullptr);

  std::size_t n_qubits() const { return n_; }
  const Map& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }
  double prob(const PauliString& p) const;
  double total() const;

  friend bool operator==(const PauliChannel&, const PauliChannel&) = default;

 private:
  std::size_t n_ = 0;
  Map probs_;
};

/// Single-qubit Pauli probabilities in the order (I, X, Y, Z).
using Pauli1Probs = std::array<double, 4>;

/// n-fold tensor power of a single-qubit Pauli channel.
PauliChannel product_channel(std::size_t n, const Pauli1Probs& probs);
/// n-fold local depolarizing channel {I: 1-p, X: p/3, Y: p/3, Z: p/3}.
PauliChannel depolarizing(std::size_t n, double p);
/// Tensor product with `a` on the low qubits and `b` on the high qubits.
PauliChannel tensor(const PauliChannel& a, const PauliChannel& b);

/// Probability of the all-identity component.
double fidelity(const PauliChannel& ch);
double infidelity(const PauliChannel& ch);
/// Average gate fidelity (d F + 1) / (d + 1) of a channel with entanglement
/// fidelity `entanglement_fidelity` on n qubits.
double average_fidelity(double entanglement_fidelity, std::size_t n);

/// Channel applying `b` first and then `a`; for Pauli channels the order does
/// not change the result.
PauliChannel compose(const PauliChannel& a, const PauliChannel& b);
/// Relabels each component P by C P C^dag.
PauliChannel conjugate_channel(const CliffordTableau& c, const PauliChannel& ch);

/// {"n": n, "probs": {"XI": p, ...}}
nlohmann::json channel_to_json(const PauliChannel& ch);
PauliChannel channel_from_json(const nlohmann::json& j);

}  // namespace qfilter
