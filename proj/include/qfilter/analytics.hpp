#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfilter/channel.hpp"

namespace qfilter {

/// A closed-form bound evaluated at one parameter point, optionally paired
/// with the exact value it should bound.
struct BoundReport {
  enum class Direction { Upper, Lower };

  std::string name;
  std::map<std::string, double> params;
  Direction direction = Direction::Upper;
  double bound = 0.0;
  std::optional<double> exact;
  bool satisfied = true;
  /// bound - exact for upper bounds, exact - bound for lower bounds.
  double slack = 0.0;
};

BoundReport make_report(std::string name, std::map<std::string, double> params,
                        BoundReport::Direction direction, double bound,
                        std::optional<double> exact);

// Binomial and multinomial coefficients with overflow checks (std::overflow_error).
uint64_t binomial(uint64_t n, uint64_t k);
uint64_t multinomial(uint64_t x, uint64_t y, uint64_t z);

/// C(n,w) 3^w / (1 + w(w-1)).
double removed_count_lower_bound(std::size_t n, std::size_t w);
/// C(n,w) 3^w / w^2.
double removed_count_lower_bound_w2(std::size_t n, std::size_t w);
/// Number of weight-w Paulis removed by the ancilla-efficient filter.
uint64_t removed_count_exact(std::size_t n, std::size_t w);
/// C(n,w) 3^w
uint64_t weight_class_size(std::size_t n, std::size_t w);
/// Mean weight of the removed Paulis.
double average_removed_weight(std::size_t n);

/// 1 - (1 - q^n)(1 + n)/(1 + n^3), q = 1 - p.
double ae_success_prob_bound(std::size_t n, double p);
/// 1 - p^2 / eps_in, the large-n form.
double ae_success_prob_bound_asymptotic(std::size_t n, double p);
/// 2 eps_in^2
double ae_infidelity_bound(double eps_in);
/// 1 - (1 - p)^n
double depolarizing_infidelity(std::size_t n, double p);

/// Single-qubit channel after the Z-filter with X feedback:
/// {I: 1 - p + pX, Z: pY + pZ}.
PauliChannel t_gate_purified(double px, double py, double pz);
/// Same with Y feedback: {I: 1 - p + pY, Z: pX + pZ}.
PauliChannel t_gate_purified_y_feedback(double px, double py, double pz);
/// (1 - 2p/3)^3
double ccz_purified_fidelity(double p);

/// F_in (1 - p)^(-k/2) for k even, 0 <= k <= 2n.
double full_correction_scaling(double f_in, double p, std::size_t k, std::size_t n);
/// 2n^2 + 2n
uint64_t select_gate_count(std::size_t n);
/// k log2(n / k); an order-of-growth indicator, not a certified constant.
double ancilla_lower_bound(std::size_t n, std::size_t k);

/// (1-pc)(1-pt)(1-2pc/3)^2(1-2pt/3)^2(1-2pc/3)
double f_critical(double pc, double pt);
/// (1-pc)(1-pt)(1-2pc)^2(1-2pt)^2(1-2pc/3)
double f_critical_loose(double pc, double pt);

struct GlobalNoiseModel {
  double fidelity = 1.0;      // (1 - eps)/(1 - eps^n)
  double output_bound = 1.0;  // 1 - 2 eps^2
};
GlobalNoiseModel global_noise_model(std::size_t n, double eps);
/// Explicit channel: weight-w mass F eps^w for w < n, spread uniformly over
/// the weight class.
PauliChannel global_noise_channel(std::size_t n, double eps);
/// Fidelity after the ancilla-efficient filter, from the removed counts.
double global_noise_filtered_fidelity(std::size_t n, double eps);

/// Exact ancilla-efficient filter statistics for an i.i.d. single-qubit
/// Pauli channel on n qubits, by summing over type counts (x, y, z).
struct SymmetricFilterStats {
  double input_fidelity = 0.0;
  double success_probability = 0.0;
  double output_fidelity = 0.0;
  double output_infidelity() const { return 1.0 - output_fidelity; }
  double input_infidelity() const { return 1.0 - input_fidelity; }
};
SymmetricFilterStats symmetric_channel_engine(std::size_t n, const Pauli1Probs& probs);

}  // namespace qfilter
