#include "qfilter/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace qfilter {

namespace {

void require_rate(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": rate " + std::to_string(p) +
                                " outside [0, 1]");
  }
}

void require_weight(std::size_t n, std::size_t w, const char* what) {
  if (w < 1 || w > n) {
    throw std::invalid_argument(std::string(what) + ": need 1 <= w <= n");
  }
}

uint64_t checked_mul(uint64_t a, uint64_t b) {
  uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow");
  return r;
}

uint64_t checked_add(uint64_t a, uint64_t b) {
  uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow");
  return r;
}

uint64_t pow3(std::size_t w) {
  uint64_t r = 1;
  for (std::size_t i = 0; i < w; ++i) r = checked_mul(r, 3);
  return r;
}

bool removed_by_counts(std::size_t x, std::size_t y, std::size_t z) {
  const int odd = static_cast<int>(x & 1) + static_cast<int>(y & 1) + static_cast<int>(z & 1);
  return odd == 1 || odd == 2;
}

long double binomial_ld(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<long double>(n - i) / (i + 1);
  return r;
}

long double pow_ld(long double base, std::size_t e) {
  return e == 0 ? 1.0L : std::pow(base, static_cast<long double>(e));
}

}  // namespace

BoundReport make_report(std::string name, std::map<std::string, double> params,
                        BoundReport::Direction direction, double bound,
                        std::optional<double> exact) {
  BoundReport r{std::move(name), std::move(params), direction, bound, exact, true, 0.0};
  if (exact) {
    r.slack = direction == BoundReport::Direction::Upper ? bound - *exact : *exact - bound;
    r.satisfied = r.slack >= -1e-12;
  }
  return r;
}

uint64_t binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > UINT64_MAX) throw std::overflow_error("binomial: overflow");
  }
  return static_cast<uint64_t>(r);
}

uint64_t multinomial(uint64_t x, uint64_t y, uint64_t z) {
  return checked_mul(binomial(x + y + z, x), binomial(y + z, y));
}

double removed_count_lower_bound(std::size_t n, std::size_t w) {
  require_weight(n, w, "removed_count_lower_bound");
  return static_cast<double>(weight_class_size(n, w)) / static_cast<double>(1 + w * (w - 1));
}

double removed_count_lower_bound_w2(std::size_t n, std::size_t w) {
  require_weight(n, w, "removed_count_lower_bound_w2");
  return static_cast<double>(weight_class_size(n, w)) / static_cast<double>(w * w);
}

uint64_t weight_class_size(std::size_t n, std::size_t w) {
  if (w > n) throw std::invalid_argument("weight_class_size: w > n");
  return checked_mul(binomial(n, w), pow3(w));
}

uint64_t removed_count_exact(std::size_t n, std::size_t w) {
  if (w > n) throw std::invalid_argument("removed_count_exact: w > n");
  uint64_t total = 0;
  for (std::size_t x = 0; x <= w; ++x) {
    for (std::size_t y = 0; x + y <= w; ++y) {
      const std::size_t z = w - x - y;
      if (removed_by_counts(x, y, z)) total = checked_add(total, multinomial(x, y, z));
    }
  }
  return checked_mul(binomial(n, w), total);
}

double average_removed_weight(std::size_t n) {
  if (n == 0) throw std::invalid_argument("average_removed_weight: n must be positive");
  long double num = 0, den = 0;
  for (std::size_t w = 1; w <= n; ++w) {
    const auto c = static_cast<long double>(removed_count_exact(n, w));
    num += w * c;
    den += c;
  }
  return static_cast<double>(num / den);
}

double depolarizing_infidelity(std::size_t n, double p) {
  require_rate(p, "depolarizing_infidelity");
  return 1.0 - std::pow(1.0 - p, static_cast<double>(n));
}

double ae_success_prob_bound(std::size_t n, double p) {
  if (n == 0) throw std::invalid_argument("ae_success_prob_bound: n must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("ae_success_prob_bound: need 0 <= p < 1");
  const double nd = static_cast<double>(n);
  return 1.0 - depolarizing_infidelity(n, p) * (1.0 + nd) / (1.0 + nd * nd * nd);
}

double ae_success_prob_bound_asymptotic(std::size_t n, double p) {
  if (n == 0) throw std::invalid_argument("ae_success_prob_bound_asymptotic: n must be positive");
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("ae_success_prob_bound_asymptotic: need 0 <= p < 1");
  }
  if (p == 0.0) return 1.0;
  return 1.0 - p * p / depolarizing_infidelity(n, p);
}

double ae_infidelity_bound(double eps_in) {
  require_rate(eps_in, "ae_infidelity_bound");
  return 2.0 * eps_in * eps_in;
}

PauliChannel t_gate_purified(double px, double py, double pz) {
  require_rate(px, "t_gate_purified");
  require_rate(py, "t_gate_purified");
  require_rate(pz, "t_gate_purified");
  const double p = px + py + pz;
  if (p > 1.0 + kNormTolerance) throw std::invalid_argument("t_gate_purified: pX + pY + pZ > 1");
  return PauliChannel::from_probs(
      1, {{PauliString::from_text("I"), 1.0 - p + px}, {PauliString::from_text("Z"), py + pz}});
}

PauliChannel t_gate_purified_y_feedback(double px, double py, double pz) {
  return t_gate_purified(py, px, pz);
}

double ccz_purified_fidelity(double p) {
  require_rate(p, "ccz_purified_fidelity");
  const double f = 1.0 - 2.0 * p / 3.0;
  return f * f * f;
}

double full_correction_scaling(double f_in, double p, std::size_t k, std::size_t n) {
  if (k % 2 != 0 || k > 2 * n) {
    throw std::invalid_argument("full_correction_scaling: need k even and k <= 2n");
  }
  require_rate(f_in, "full_correction_scaling");
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("full_correction_scaling: need 0 <= p < 1");
  return f_in * std::pow(1.0 - p, -0.5 * static_cast<double>(k));
}

uint64_t select_gate_count(std::size_t n) {
  return checked_add(checked_mul(2, checked_mul(n, n)), checked_mul(2, n));
}

double ancilla_lower_bound(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("ancilla_lower_bound: need 1 <= k <= n");
  return static_cast<double>(k) * std::log2(static_cast<double>(n) / static_cast<double>(k));
}

double f_critical(double pc, double pt) {
  require_rate(pc, "f_critical");
  require_rate(pt, "f_critical");
  const double c = 1.0 - 2.0 * pc / 3.0;
  const double t = 1.0 - 2.0 * pt / 3.0;
  return (1.0 - pc) * (1.0 - pt) * c * c * t * t * c;
}

double f_critical_loose(double pc, double pt) {
  require_rate(pc, "f_critical_loose");
  require_rate(pt, "f_critical_loose");
  const double c = 1.0 - 2.0 * pc;
  const double t = 1.0 - 2.0 * pt;
  return (1.0 - pc) * (1.0 - pt) * c * c * t * t * (1.0 - 2.0 * pc / 3.0);
}

GlobalNoiseModel global_noise_model(std::size_t n, double eps) {
  if (n == 0) throw std::invalid_argument("global_noise_model: n must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("global_noise_model: need 0 <= eps < 1");
  const double f = (1.0 - eps) / (1.0 - std::pow(eps, static_cast<double>(n)));
  return {f, 1.0 - 2.0 * eps * eps};
}

PauliChannel global_noise_channel(std::size_t n, double eps) {
  const double f = global_noise_model(n, eps).fidelity;
  PauliChannel::Map probs;
  for_each_pauli(n, std::nullopt, [&](const PauliString& p) {
    const std::size_t w = weight(p);
    if (w == n) return;
    const double mass = f * std::pow(eps, static_cast<double>(w));
    if (mass > 0.0) probs[p] = mass / static_cast<double>(weight_class_size(n, w));
  });
  return PauliChannel::normalized(n, probs);
}

double global_noise_filtered_fidelity(std::size_t n, double eps) {
  const double f = global_noise_model(n, eps).fidelity;
  long double kept = 0;
  for (std::size_t w = 0; w < n; ++w) {
    const long double mass = f * pow_ld(eps, w);
    const auto removed = static_cast<long double>(w == 0 ? 0 : removed_count_exact(n, w));
    const auto size = static_cast<long double>(weight_class_size(n, w));
    kept += mass * (1.0L - removed / size);
  }
  return static_cast<double>(f / kept);
}

SymmetricFilterStats symmetric_channel_engine(std::size_t n, const Pauli1Probs& probs) {
  if (n == 0) throw std::invalid_argument("symmetric_channel_engine: n must be positive");
  long double total = 0;
  for (double v : probs) {
    require_rate(v, "symmetric_channel_engine");
    total += v;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance) {
    throw std::invalid_argument("symmetric_channel_engine: probabilities must sum to 1");
  }
  const long double pi = probs[0], px = probs[1], py = probs[2], pz = probs[3];
  long double kept = 0;
  for (std::size_t w = 0; w <= n; ++w) {
    const long double cw = binomial_ld(n, w) * pow_ld(pi, n - w);
    for (std::size_t x = 0; x <= w; ++x) {
      for (std::size_t y = 0; x + y <= w; ++y) {
        const std::size_t z = w - x - y;
        if (removed_by_counts(x, y, z)) continue;
        kept += cw * binomial_ld(w, x) * binomial_ld(w - x, y) * pow_ld(px, x) * pow_ld(py, y) *
                pow_ld(pz, z);
      }
    }
  }
  SymmetricFilterStats s;
  const long double f_in = pow_ld(pi, n);
  s.input_fidelity = static_cast<double>(f_in);
  s.success_probability = static_cast<double>(kept);
  s.output_fidelity = kept > 0 ? static_cast<double>(f_in / kept) : 0.0;
  return s;
}

}  // namespace qfilter
