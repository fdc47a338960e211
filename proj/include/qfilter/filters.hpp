#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qfilter/channel.hpp"
#include "qfilter/dense.hpp"
#include "qfilter/pauli.hpp"

namespace qfilter {

/// One measurement branch of a filter: the renormalized channel seen by the
/// system and the probability of the branch. A zero-probability branch keeps
/// an empty channel.
struct FilterOutcome {
  std::string label;
  PauliChannel channel;
  double probability = 0.0;
};

/// Branch "0" keeps the components commuting with `probe`, branch "1" the
/// anticommuting ones.
std::array<FilterOutcome, 2> commutation_filter(const PauliChannel& ch, const PauliString& probe);

/// Applies commutation filters in order and keeps the requested branch of
/// each. Throws if a selected branch has probability zero.
FilterOutcome successive_filtration(const PauliChannel& ch, const std::vector<PauliString>& probes,
                                    const std::vector<int>& postselect);

/// Per-qubit correction branch u = (u0, u1): u0 is the Z-filter outcome, u1
/// the X-filter outcome, so (I, Z, X, Y) <-> ("00", "01", "10", "11").
struct CorrectionResult {
  PauliChannel channel;
  /// Branch label (two characters per qubit) -> probability.
  std::map<std::string, double> syndrome;
};

/// Runs the noiseless X/Z correction filter on every qubit.
CorrectionResult channel_correction(const PauliChannel& ch);

/// The four super-Kraus images F_u[E] of a single-qubit operator, indexed by
/// u = 2 u0 + u1.
std::array<Matrix, 4> correction_superkraus_apply(const Matrix& e);

/// Prepare weights with pairs (P_i, Q_i): outcome j maps a noise operator N to
/// sum_i alpha_ij Q_i N P_i. Without `prepare`, alpha_i0 = p_i; with a prepare
/// unitary V, alpha_ij = V_i0 conj(V_ij).
struct GeneralFilterSpec {
  std::vector<double> weights;
  std::vector<std::pair<PauliString, PauliString>> pairs;
  std::optional<Matrix> prepare;

  std::size_t n_qubits() const;
  void validate() const;
};

nlohmann::json filter_spec_to_json(const GeneralFilterSpec& spec);
GeneralFilterSpec filter_spec_from_json(const nlohmann::json& j);

/// Scalar c with sum_i alpha_ij Q_i N P_i = c N. Throws if some Q_i N P_i is
/// not proportional to N.
cplx general_filter_scalar(const GeneralFilterSpec& spec, const PauliString& n, std::size_t j = 0);
FilterOutcome general_filter_outcome(const PauliChannel& ch, const GeneralFilterSpec& spec,
                                     std::size_t j = 0);

/// Uniform SELECT over {I, Z^n, X^n, Y^n} with P_i = Q_i.
GeneralFilterSpec ae_filter_spec(std::size_t n);
/// True iff exactly two of (w, x, y, z) are odd.
bool ae_removes(const PauliString& p);
/// Ancilla-efficient filter on a channel already expressed after the circuit.
FilterOutcome ae_filter(const PauliChannel& ch);

}  // namespace qfilter
