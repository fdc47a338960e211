#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfilter {

/// Single-qubit Pauli label. The numeric value packs (x, z) as x | (z << 1).
enum class Pauli1 : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

/// n-qubit Pauli operator i^phase * prod_j X_j^{x_j} * prod_j Z_j^{z_j}.
///
/// The X and Z parts are bit-packed into 64-bit words. Note that the phase
/// exponent is relative to the X^x Z^z product, so the Hermitian operator Y
/// has x=1, z=1, phase_exp=1 (Y = i X Z). Use sign_exponent() for the phase
/// relative to the usual tensor-product form.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);

  /// Parses "[+|-|+i|-i|i]PAULIS", e.g. "-IXYZ". Throws std::invalid_argument.
  static PauliString from_text(std::string_view text);
  /// Hermitian single-qubit Pauli `p` on qubit `q` of an n-qubit register.
  static PauliString single(std::size_t n_qubits, std::size_t q, Pauli1 p);
  /// Hermitian Pauli with the same label on every qubit, e.g. Z^{(x)n}.
  static PauliString uniform(std::size_t n_qubits, Pauli1 p);
  /// Hermitian Pauli from packed (x, z) bit masks; requires n_qubits <= 64.
  static PauliString from_masks(std::size_t n_qubits, uint64_t x_mask, uint64_t z_mask);

  std::size_t n_qubits() const { return n_; }
  std::size_t num_words() const { return xs_.size(); }

  bool x(std::size_t q) const { return (xs_[q >> 6] >> (q & 63)) & 1u; }
  bool z(std::size_t q) const { return (zs_[q >> 6] >> (q & 63)) & 1u; }
  void set_x(std::size_t q, bool v);
  void set_z(std::size_t q, bool v);
  Pauli1 get(std::size_t q) const {
    return static_cast<Pauli1>(static_cast<uint8_t>(x(q)) | (static_cast<uint8_t>(z(q)) << 1));
  }
  /// Sets qubit q to the Hermitian single-qubit Pauli `p`, keeping the overall sign.
  void set(std::size_t q, Pauli1 p);

  const std::vector<uint64_t>& x_words() const { return xs_; }
  const std::vector<uint64_t>& z_words() const { return zs_; }
  std::vector<uint64_t>& x_words() { return xs_; }
  std::vector<uint64_t>& z_words() { return zs_; }

  /// Exponent k of i^k in the X^x Z^z convention.
  uint8_t phase_exp() const { return phase_; }
  void set_phase_exp(unsigned k) { phase_ = static_cast<uint8_t>(k & 3u); }
  /// Exponent k such that this operator equals i^k times the Hermitian tensor product.
  uint8_t sign_exponent() const;
  bool is_hermitian() const { return (sign_exponent() & 1u) == 0; }

  /// Drops the phase, returning the Hermitian representative (+ sign).
  PauliString phase_free() const;
  bool is_identity() const;

  /// Low word of the X / Z masks (qubits 0..63).
  uint64_t x_mask() const { return xs_.empty() ? 0 : xs_[0]; }
  uint64_t z_mask() const { return zs_.empty() ? 0 : zs_[0]; }

  std::string str() const;

  friend bool operator==(const PauliString& a, const PauliString& b) = default;

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> xs_;
  std::vector<uint64_t> zs_;
  uint8_t phase_ = 0;
};

/// Counts of X, Y and Z factors of a Pauli string.
struct PauliTypeCount {
  std::size_t x_count = 0;
  std::size_t y_count = 0;
  std::size_t z_count = 0;

  std::size_t weight() const { return x_count + y_count + z_count; }
  friend bool operator==(const PauliTypeCount&, const PauliTypeCount&) = default;
};

PauliString multiply(const PauliString& a, const PauliString& b);
PauliString operator*(const PauliString& a, const PauliString& b);

/// True iff the symplectic inner product of a and b vanishes.
bool commutes(const PauliString& a, const PauliString& b);

std::size_t weight(const PauliString& a);
PauliTypeCount type_count(const PauliString& a);

/// Orders phase-free Pauli labels lexicographically by (z words, x words).
/// Phases are compared last so the order is total.
struct PauliLess {
  bool operator()(const PauliString& a, const PauliString& b) const;
};

/// Largest register accepted by enumerate_paulis / for_each_pauli.
inline constexpr std::size_t kMaxEnumerationQubits = 10;

/// Visits every phase-free n-qubit Pauli with weight <= max_weight exactly
/// once, in increasing (z_bits, x_bits) order.
void for_each_pauli(std::size_t n, std::optional<std::size_t> max_weight,
                    const std::function<void(const PauliString&)>& visit);
std::vector<PauliString> enumerate_paulis(std::size_t n,
                                          std::optional<std::size_t> max_weight = std::nullopt);

/// Number of n-qubit Paulis of weight <= k, sum_i C(n,i) 3^i.
uint64_t count_paulis_up_to_weight(std::size_t n, std::size_t k);

}  // namespace qfilter
