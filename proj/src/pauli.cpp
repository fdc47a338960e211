#include "qfilter/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace qfilter {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

unsigned popcount_and(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
  unsigned total = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    total += static_cast<unsigned>(std::popcount(a[w] & b[w]));
  }
  return total;
}

void require_same_size(const PauliString& a, const PauliString& b, const char* op) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument(std::string(op) + ": qubit count mismatch (" +
                                std::to_string(a.n_qubits()) + " vs " +
                                std::to_string(b.n_qubits()) + ")");
  }
}

}  // namespace

PauliString::PauliString(std::size_t n_qubits)
    : n_(n_qubits), xs_(words_for(n_qubits), 0), zs_(words_for(n_qubits), 0) {}

PauliString PauliString::from_text(std::string_view text) {
  unsigned sign = 0;
  if (text.starts_with("+i")) {
    sign = 1;
    text.remove_prefix(2);
  } else if (text.starts_with("-i")) {
    sign = 3;
    text.remove_prefix(2);
  } else if (text.starts_with("i")) {
    sign = 1;
    text.remove_prefix(1);
  } else if (text.starts_with("+")) {
    text.remove_prefix(1);
  } else if (text.starts_with("-")) {
    sign = 2;
    text.remove_prefix(1);
  }
  if (text.empty()) {
    throw std::invalid_argument("PauliString::from_text: empty Pauli body");
  }
  PauliString p(text.size());
  unsigned ys = 0;
  for (std::size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I':
      case '_':
        break;
      case 'X':
        p.set_x(q, true);
        break;
      case 'Z':
        p.set_z(q, true);
        break;
      case 'Y':
        p.set_x(q, true);
        p.set_z(q, true);
        ++ys;
        break;
      default:
        throw std::invalid_argument("PauliString::from_text: bad character '" +
                                    std::string(1, text[q]) + "'");
    }
  }
  p.phase_ = static_cast<uint8_t>((sign + ys) & 3u);
  return p;
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t q, Pauli1 p) {
  if (q >= n_qubits) {
    throw std::out_of_range("PauliString::single: qubit index out of range");
  }
  PauliString out(n_qubits);
  out.set(q, p);
  return out;
}

PauliString PauliString::uniform(std::size_t n_qubits, Pauli1 p) {
  PauliString out(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) out.set(q, p);
  return out;
}

PauliString PauliString::from_masks(std::size_t n_qubits, uint64_t x_mask, uint64_t z_mask) {
  if (n_qubits > 64) {
    throw std::invalid_argument("PauliString::from_masks: at most 64 qubits");
  }
  PauliString out(n_qubits);
  if (n_qubits == 0) return out;
  const uint64_t keep = n_qubits == 64 ? ~uint64_t{0} : ((uint64_t{1} << n_qubits) - 1);
  out.xs_[0] = x_mask & keep;
  out.zs_[0] = z_mask & keep;
  out.phase_ = static_cast<uint8_t>(std::popcount(out.xs_[0] & out.zs_[0]) & 3);
  return out;
}

void PauliString::set_x(std::size_t q, bool v) {
  const uint64_t bit = uint64_t{1} << (q & 63);
  if (v) {
    xs_[q >> 6] |= bit;
  } else {
    xs_[q >> 6] &= ~bit;
  }
}

void PauliString::set_z(std::size_t q, bool v) {
  const uint64_t bit = uint64_t{1} << (q & 63);
  if (v) {
    zs_[q >> 6] |= bit;
  } else {
    zs_[q >> 6] &= ~bit;
  }
}

void PauliString::set(std::size_t q, Pauli1 p) {
  const unsigned sign = sign_exponent();
  const auto v = static_cast<uint8_t>(p);
  set_x(q, v & 1u);
  set_z(q, v & 2u);
  phase_ = static_cast<uint8_t>((sign + popcount_and(xs_, zs_)) & 3u);
}

uint8_t PauliString::sign_exponent() const {
  return static_cast<uint8_t>((phase_ + 4u - (popcount_and(xs_, zs_) & 3u)) & 3u);
}

PauliString PauliString::phase_free() const {
  PauliString out = *this;
  out.phase_ = static_cast<uint8_t>(popcount_and(xs_, zs_) & 3u);
  return out;
}

bool PauliString::is_identity() const {
  for (std::size_t w = 0; w < xs_.size(); ++w) {
    if (xs_[w] | zs_[w]) return false;
  }
  return true;
}

std::string PauliString::str() const {
  static constexpr const char* kSigns[4] = {"+", "+i", "-", "-i"};
  static constexpr char kChars[4] = {'I', 'X', 'Z', 'Y'};
  std::string out = kSigns[sign_exponent()];
  out.reserve(out.size() + n_);
  for (std::size_t q = 0; q < n_; ++q) out.push_back(kChars[static_cast<uint8_t>(get(q))]);
  return out;
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  require_same_size(a, b, "multiply");
  // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{z1.x2} X^{x1+x2} Z^{z1+z2}
  PauliString out = a;
  const unsigned swaps = popcount_and(a.z_words(), b.x_words());
  for (std::size_t w = 0; w < a.num_words(); ++w) {
    out.x_words()[w] ^= b.x_words()[w];
    out.z_words()[w] ^= b.z_words()[w];
  }
  out.set_phase_exp(a.phase_exp() + b.phase_exp() + 2 * (swaps & 1u));
  return out;
}

PauliString operator*(const PauliString& a, const PauliString& b) { return multiply(a, b); }

bool commutes(const PauliString& a, const PauliString& b) {
  require_same_size(a, b, "commutes");
  uint64_t acc = 0;
  for (std::size_t w = 0; w < a.num_words(); ++w) {
    acc ^= (a.x_words()[w] & b.z_words()[w]) ^ (a.z_words()[w] & b.x_words()[w]);
  }
  return (std::popcount(acc) & 1) == 0;
}

std::size_t weight(const PauliString& a) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < a.num_words(); ++w) {
    total += static_cast<std::size_t>(std::popcount(a.x_words()[w] | a.z_words()[w]));
  }
  return total;
}

PauliTypeCount type_count(const PauliString& a) {
  PauliTypeCount c;
  for (std::size_t w = 0; w < a.num_words(); ++w) {
    const uint64_t x = a.x_words()[w];
    const uint64_t z = a.z_words()[w];
    c.x_count += static_cast<std::size_t>(std::popcount(x & ~z));
    c.y_count += static_cast<std::size_t>(std::popcount(x & z));
    c.z_count += static_cast<std::size_t>(std::popcount(~x & z));
  }
  return c;
}

bool PauliLess::operator()(const PauliString& a, const PauliString& b) const {
  if (a.n_qubits() != b.n_qubits()) return a.n_qubits() < b.n_qubits();
  for (std::size_t w = a.num_words(); w-- > 0;) {
    if (a.z_words()[w] != b.z_words()[w]) return a.z_words()[w] < b.z_words()[w];
  }
  for (std::size_t w = a.num_words(); w-- > 0;) {
    if (a.x_words()[w] != b.x_words()[w]) return a.x_words()[w] < b.x_words()[w];
  }
  return a.phase_exp() < b.phase_exp();
}

void for_each_pauli(std::size_t n, std::optional<std::size_t> max_weight,
                    const std::function<void(const PauliString&)>& visit) {
  if (n == 0) throw std::invalid_argument("for_each_pauli: n must be positive");
  if (n > kMaxEnumerationQubits) {
    throw std::invalid_argument("for_each_pauli: n=" + std::to_string(n) +
                                " exceeds the enumeration limit of " +
                                std::to_string(kMaxEnumerationQubits));
  }
  const uint64_t size = uint64_t{1} << n;
  for (uint64_t z = 0; z < size; ++z) {
    for (uint64_t x = 0; x < size; ++x) {
      if (max_weight && static_cast<std::size_t>(std::popcount(x | z)) > *max_weight) continue;
      visit(PauliString::from_masks(n, x, z));
    }
  }
}

std::vector<PauliString> enumerate_paulis(std::size_t n, std::optional<std::size_t> max_weight) {
  std::vector<PauliString> out;
  out.reserve(max_weight ? count_paulis_up_to_weight(n, *max_weight) : (uint64_t{1} << (2 * n)));
  for_each_pauli(n, max_weight, [&](const PauliString& p) { out.push_back(p); });
  return out;
}

uint64_t count_paulis_up_to_weight(std::size_t n, std::size_t k) {
  uint64_t total = 0;
  uint64_t binom = 1;
  uint64_t pow3 = 1;
  for (std::size_t i = 0; i <= k && i <= n; ++i) {
    total += binom * pow3;
    binom = binom * (n - i) / (i + 1);
    pow3 *= 3;
  }
  return total;
}

}  // namespace qfilter
