#include "qfilter/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace qfilter {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability " + std::to_string(p) +
                                " outside [0, 1]");
  }
}

}  // namespace

PauliChannel PauliChannel::identity(std::size_t n_qubits) {
  PauliChannel ch(n_qubits);
  ch.probs_.emplace(PauliString(n_qubits), 1.0);
  return ch;
}

PauliChannel PauliChannel::from_probs(std::size_t n_qubits, const Map& probs) {
  PauliChannel ch(n_qubits);
  long double total = 0;
  for (const auto& [p, v] : probs) {
    if (p.n_qubits() != n_qubits) {
      throw std::invalid_argument("PauliChannel: key " + p.str() + " has wrong qubit count");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("PauliChannel: negative or non-finite probability for " +
                                  p.str());
    }
    total += v;
    if (v > 0.0) ch.probs_[p.phase_free()] += v;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance) {
    throw std::invalid_argument("PauliChannel: probabilities sum to " +
                                std::to_string(static_cast<double>(total)) + ", expected 1");
  }
  return ch;
}

PauliChannel PauliChannel::normalized(std::size_t n_qubits, const Map& weights, double* total) {
  long double sum = 0;
  for (const auto& [p, v] : weights) {
    if (v < 0.0) throw std::invalid_argument("PauliChannel::normalized: negative weight");
    sum += v;
  }
  if (total) *total = static_cast<double>(sum);
  PauliChannel ch(n_qubits);
  if (sum <= 0) return ch;
  for (const auto& [p, v] : weights) {
    if (p.n_qubits() != n_qubits) {
      throw std::invalid_argument("PauliChannel::normalized: wrong qubit count");
    }
    if (v > 0.0) ch.probs_[p.phase_free()] += static_cast<double>(v / sum);
  }
  if (std::fabs(ch.total() - 1.0) > 1e-9) {
    throw std::logic_error("PauliChannel::normalized: normalization drift");
  }
  return ch;
}

double PauliChannel::prob(const PauliString& p) const {
  auto it = probs_.find(p.phase_free());
  return it == probs_.end() ? 0.0 : it->second;
}

double PauliChannel::total() const {
  long double t = 0;
  for (const auto& [p, v] : probs_) t += v;
  return static_cast<double>(t);
}

PauliChannel product_channel(std::size_t n, const Pauli1Probs& probs) {
  if (n == 0) throw std::invalid_argument("product_channel: n must be positive");
  if (n > kMaxEnumerationQubits) {
    throw std::invalid_argument("product_channel: n=" + std::to_string(n) +
                                " too large to expand");
  }
  long double total = 0;
  for (double v : probs) {
    require_probability(v, "product_channel");
    total += v;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance) {
    throw std::invalid_argument("product_channel: single-qubit probabilities must sum to 1");
  }
  static constexpr Pauli1 kOrder[4] = {Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z};
  PauliChannel::Map acc{{PauliString(n), 1.0}};
  for (std::size_t q = 0; q < n; ++q) {
    PauliChannel::Map next;
    for (const auto& [p, v] : acc) {
      for (int k = 0; k < 4; ++k) {
        if (probs[k] == 0.0) continue;
        PauliString r = p;
        r.set(q, kOrder[k]);
        next[r] += v * probs[k];
      }
    }
    acc = std::move(next);
  }
  return PauliChannel::normalized(n, acc);
}

PauliChannel depolarizing(std::size_t n, double p) {
  require_probability(p, "depolarizing");
  return product_channel(n, {1.0 - p, p / 3, p / 3, p / 3});
}

PauliChannel tensor(const PauliChannel& a, const PauliChannel& b) {
  const std::size_t n = a.n_qubits() + b.n_qubits();
  PauliChannel::Map out;
  for (const auto& [pa, va] : a.probs()) {
    for (const auto& [pb, vb] : b.probs()) {
      PauliString r(n);
      for (std::size_t q = 0; q < a.n_qubits(); ++q) r.set(q, pa.get(q));
      for (std::size_t q = 0; q < b.n_qubits(); ++q) r.set(a.n_qubits() + q, pb.get(q));
      out[r] += va * vb;
    }
  }
  return PauliChannel::normalized(n, out);
}

double fidelity(const PauliChannel& ch) { return ch.prob(PauliString(ch.n_qubits())); }

double infidelity(const PauliChannel& ch) { return 1.0 - fidelity(ch); }

double average_fidelity(double entanglement_fidelity, std::size_t n) {
  const double d = std::ldexp(1.0, static_cast<int>(n));
  return (d * entanglement_fidelity + 1.0) / (d + 1.0);
}

PauliChannel compose(const PauliChannel& a, const PauliChannel& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("compose: qubit count mismatch");
  }
  PauliChannel::Map out;
  for (const auto& [pa, va] : a.probs()) {
    for (const auto& [pb, vb] : b.probs()) {
      out[multiply(pa, pb).phase_free()] += va * vb;
    }
  }
  return PauliChannel::normalized(a.n_qubits(), out);
}

PauliChannel conjugate_channel(const CliffordTableau& c, const PauliChannel& ch) {
  if (c.n_qubits() != ch.n_qubits()) {
    throw std::invalid_argument("conjugate_channel: qubit count mismatch");
  }
  PauliChannel::Map out;
  for (const auto& [p, v] : ch.probs()) out[c.forward(p).phase_free()] += v;
  return PauliChannel::from_probs(ch.n_qubits(), out);
}

nlohmann::json channel_to_json(const PauliChannel& ch) {
  nlohmann::json probs = nlohmann::json::object();
  for (const auto& [p, v] : ch.probs()) probs[p.str().substr(1)] = v;
  return {{"n", ch.n_qubits()}, {"probs", probs}};
}

PauliChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("probs")) {
    throw std::invalid_argument("channel JSON needs \"n\" and \"probs\"");
  }
  const auto n = j.at("n").get<std::size_t>();
  PauliChannel::Map probs;
  for (const auto& [label, v] : j.at("probs").items()) {
    PauliString p = PauliString::from_text(label);
    if (p.sign_exponent() != 0) {
      throw std::invalid_argument("channel JSON: keys must not carry a phase");
    }
    probs[p] += v.get<double>();
  }
  return PauliChannel::from_probs(n, probs);
}

}  // namespace qfilter
