#include "qfilter/dense.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qfilter {

namespace {

constexpr std::size_t kMaxPauliMatrixQubits = 10;

const cplx kI{0.0, 1.0};

cplx i_pow(unsigned k) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[k & 3u];
}

std::size_t spread_bits(std::size_t local, const std::vector<uint32_t>& qubits) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if ((local >> i) & 1u) out |= std::size_t{1} << qubits[i];
  }
  return out;
}

std::size_t gather_bits(std::size_t index, const std::vector<uint32_t>& qubits) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if ((index >> qubits[i]) & 1u) out |= std::size_t{1} << i;
  }
  return out;
}

void check_local(const Matrix& op, const std::vector<uint32_t>& qubits, std::size_t n) {
  const std::size_t k = qubits.size();
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != (std::size_t{1} << k)) {
    throw std::invalid_argument("local operator size does not match its qubit list");
  }
  std::size_t seen = 0;
  for (uint32_t q : qubits) {
    if (q >= n) throw std::out_of_range("local operator qubit index out of range");
    if ((seen >> q) & 1u) throw std::invalid_argument("local operator repeats a qubit");
    seen |= std::size_t{1} << q;
  }
}

std::size_t qubits_of_dim(Eigen::Index d) {
  const auto ud = static_cast<std::size_t>(d);
  if (ud == 0 || (ud & (ud - 1)) != 0) throw std::invalid_argument("dimension is not 2^n");
  return static_cast<std::size_t>(std::countr_zero(ud));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

Matrix pauli_matrix(const PauliString& p) {
  const std::size_t n = p.n_qubits();
  if (n > kMaxPauliMatrixQubits) throw std::invalid_argument("pauli_matrix: too many qubits");
  const std::size_t d = std::size_t{1} << n;
  const uint64_t x = p.x_mask(), z = p.z_mask();
  const cplx phase = i_pow(p.phase_exp());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t b = 0; b < d; ++b) {
    const bool neg = std::popcount(z & b) & 1;
    m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) = neg ? -phase : phase;
  }
  return m;
}

Matrix gate_matrix(GateKind kind) {
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix m;
  switch (kind) {
    case GateKind::H:
      m.resize(2, 2);
      m << r, r, r, -r;
      return m;
    case GateKind::S:
      m = Matrix::Identity(2, 2);
      m(1, 1) = kI;
      return m;
    case GateKind::SDG:
      m = Matrix::Identity(2, 2);
      m(1, 1) = -kI;
      return m;
    case GateKind::X:
      return pauli_matrix(PauliString::from_text("X"));
    case GateKind::Y:
      return pauli_matrix(PauliString::from_text("Y"));
    case GateKind::Z:
      return pauli_matrix(PauliString::from_text("Z"));
    case GateKind::CX:
      // local bit 0 is the control, bit 1 the target
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(2, 2) = 1;
      m(3, 1) = m(1, 3) = 1;
      return m;
    case GateKind::CY:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(2, 2) = 1;
      m(3, 1) = kI;
      m(1, 3) = -kI;
      return m;
    case GateKind::CZ:
      m = Matrix::Identity(4, 4);
      m(3, 3) = -1;
      return m;
  }
  throw std::logic_error("gate_matrix: unknown gate kind");
}

Matrix embed(const Matrix& op, const std::vector<uint32_t>& qubits, std::size_t n) {
  if (n > kMaxPauliMatrixQubits) throw std::invalid_argument("embed: too many qubits");
  check_local(op, qubits, n);
  const std::size_t d = std::size_t{1} << n;
  const std::size_t dk = std::size_t{1} << qubits.size();
  const std::size_t mask = spread_bits(dk - 1, qubits);
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t lc = gather_bits(c, qubits);
    const std::size_t rest = c & ~mask;
    for (std::size_t lr = 0; lr < dk; ++lr) {
      out(static_cast<Eigen::Index>(rest | spread_bits(lr, qubits)), static_cast<Eigen::Index>(c)) =
          op(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
    }
  }
  return out;
}

Matrix circuit_unitary(const CliffordCircuit& circ) {
  const std::size_t n = circ.n_qubits();
  if (n > kMaxDenseQubits) throw std::invalid_argument("circuit_unitary: too many qubits");
  Matrix u = Matrix::Identity(std::size_t{1} << n, std::size_t{1} << n);
  for (const Gate& g : circ.gates()) {
    std::vector<uint32_t> qs{g.q0};
    if (is_two_qubit(g.kind)) qs.push_back(g.q1);
    apply_local_left(u, gate_matrix(g.kind), qs);
  }
  return u;
}

Matrix t_gate() {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, std::numbers::pi / 4);
  return m;
}

Matrix ccz_gate() {
  Matrix m = Matrix::Identity(8, 8);
  m(7, 7) = -1;
  return m;
}

Matrix x_rotation(double theta) {
  Matrix m(2, 2);
  m << std::cos(theta), kI * std::sin(theta), kI * std::sin(theta), std::cos(theta);
  return m;
}

void apply_local_left(Matrix& rho, const Matrix& op, const std::vector<uint32_t>& qubits) {
  const std::size_t n = qubits_of_dim(rho.rows());
  check_local(op, qubits, n);
  const std::size_t d = static_cast<std::size_t>(rho.rows());
  const std::size_t dk = std::size_t{1} << qubits.size();
  const std::size_t mask = spread_bits(dk - 1, qubits);
  std::vector<Eigen::Index> rows(dk);
  for (std::size_t l = 0; l < dk; ++l) rows[l] = static_cast<Eigen::Index>(spread_bits(l, qubits));
  Eigen::VectorXcd in(static_cast<Eigen::Index>(dk));
  for (std::size_t base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      for (std::size_t l = 0; l < dk; ++l) in(static_cast<Eigen::Index>(l)) = rho(base + rows[l], c);
      const Eigen::VectorXcd out = op * in;
      for (std::size_t l = 0; l < dk; ++l) rho(base + rows[l], c) = out(static_cast<Eigen::Index>(l));
    }
  }
}

void apply_local(Matrix& rho, const Matrix& op, const std::vector<uint32_t>& qubits) {
  apply_local_left(rho, op, qubits);
  rho.adjointInPlace();
  apply_local_left(rho, op, qubits);
  rho.adjointInPlace();
}

DenseChannel::DenseChannel(std::size_t n_qubits, std::vector<Matrix> kraus, bool trace_preserving)
    : n_(n_qubits), kraus_(std::move(kraus)) {
  if (n_ > kMaxDenseChannelQubits) {
    throw std::invalid_argument("DenseChannel: at most " + std::to_string(kMaxDenseChannelQubits) +
                                " qubits");
  }
  if (kraus_.empty()) throw std::invalid_argument("DenseChannel: no Kraus operators");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_);
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : kraus_) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("DenseChannel: Kraus operator has wrong size");
    }
    sum += k.adjoint() * k;
  }
  if (trace_preserving && (sum - Matrix::Identity(d, d)).norm() > 1e-10) {
    throw std::invalid_argument("DenseChannel: Kraus operators are not trace preserving");
  }
}

DenseChannel DenseChannel::identity(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  return DenseChannel(n_qubits, {Matrix::Identity(d, d)});
}

DenseChannel DenseChannel::unitary(const Matrix& u) {
  return DenseChannel(qubits_of_dim(u.rows()), {u});
}

DenseChannel dense_from_pauli(const PauliChannel& ch) {
  if (ch.empty()) throw std::invalid_argument("dense_from_pauli: empty channel");
  std::vector<Matrix> kraus;
  for (const auto& [p, v] : ch.probs()) kraus.push_back(std::sqrt(v) * pauli_matrix(p));
  return DenseChannel(ch.n_qubits(), std::move(kraus));
}

Matrix dense_apply(const DenseChannel& ch, const Matrix& rho) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << ch.n_qubits());
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("dense_apply: density matrix has wrong size");
  }
  Matrix out = Matrix::Zero(d, d);
  for (const Matrix& k : ch.kraus()) out += k * rho * k.adjoint();
  return out;
}

Matrix Superoperator::apply(const Matrix& rho) const {
  const auto d = static_cast<Eigen::Index>(dim());
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("Superoperator::apply: input has wrong size");
  }
  const Eigen::VectorXcd v = m * Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Superoperator Superoperator::identity(std::size_t n_qubits) {
  const auto d2 = static_cast<Eigen::Index>(std::size_t{1} << (2 * n_qubits));
  return {n_qubits, Matrix::Identity(d2, d2)};
}

Superoperator superop_from_kraus(std::size_t n_qubits, const std::vector<Matrix>& kraus) {
  const auto d2 = static_cast<Eigen::Index>(std::size_t{1} << (2 * n_qubits));
  Superoperator s{n_qubits, Matrix::Zero(d2, d2)};
  for (const Matrix& k : kraus) s.m += kron(k.conjugate(), k);
  return s;
}

Superoperator superop(const DenseChannel& ch) { return superop_from_kraus(ch.n_qubits(), ch.kraus()); }

Superoperator superop(const PauliChannel& ch) {
  if (ch.n_qubits() > kMaxDenseQubits) throw std::invalid_argument("superop: too many qubits");
  std::vector<Matrix> kraus;
  for (const auto& [p, v] : ch.probs()) kraus.push_back(std::sqrt(v) * pauli_matrix(p));
  return superop_from_kraus(ch.n_qubits(), kraus);
}

Superoperator then(const Superoperator& first, const Superoperator& second) {
  if (first.n_qubits != second.n_qubits) throw std::invalid_argument("then: size mismatch");
  return {first.n_qubits, second.m * first.m};
}

double channel_distance(const Superoperator& a, const Superoperator& b) {
  if (a.n_qubits != b.n_qubits) throw std::invalid_argument("channel_distance: size mismatch");
  if (a.n_qubits > kMaxDenseChannelQubits) {
    throw std::invalid_argument("channel_distance: at most " +
                                std::to_string(kMaxDenseChannelQubits) + " qubits");
  }
  const Matrix diff = a.m - b.m;
  const auto d2 = static_cast<Eigen::Index>(a.dim() * a.dim());
  double worst = 0.0;
  for_each_pauli(a.n_qubits, std::nullopt, [&](const PauliString& p) {
    const Matrix in = pauli_matrix(p);
    const Eigen::VectorXcd out = diff * Eigen::Map<const Eigen::VectorXcd>(in.data(), d2);
    worst = std::max(worst, out.norm());
  });
  return worst;
}

double channel_distance(const DenseChannel& a, const DenseChannel& b) {
  return channel_distance(superop(a), superop(b));
}

PauliChannel::Map pauli_weights(const Superoperator& s, double drop) {
  const std::size_t n = s.n_qubits;
  const std::size_t d = s.dim();
  PauliChannel::Map out;
  for_each_pauli(n, std::nullopt, [&](const PauliString& p) {
    const uint64_t x = p.x_mask(), z = p.z_mask();
    const cplx phase = i_pow(p.phase_exp());
    auto v = [&](std::size_t b) { return (std::popcount(z & b) & 1) ? -phase : phase; };
    cplx acc = 0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const auto row = static_cast<Eigen::Index>((i ^ x) + d * (j ^ x));
        const auto col = static_cast<Eigen::Index>(i + d * j);
        acc += std::conj(v(i)) * s.m(row, col) * v(j);
      }
    }
    const double w = acc.real() / static_cast<double>(d * d);
    if (std::fabs(w) > drop) out[p] = w;
  });
  return out;
}

PauliChannel pauli_channel_of(const Superoperator& s) {
  PauliChannel::Map w = pauli_weights(s, 0.0);
  for (auto& [p, v] : w) {
    if (v < -1e-9) throw std::invalid_argument("pauli_channel_of: negative Pauli weight");
    if (v < 0) v = 0;
  }
  return PauliChannel::normalized(s.n_qubits, w);
}

DenseChannel random_dense_channel(std::size_t n_qubits, std::size_t n_kraus, uint64_t seed) {
  if (n_kraus == 0) throw std::invalid_argument("random_dense_channel: need at least one Kraus");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  const auto rows = d * static_cast<Eigen::Index>(n_kraus);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(rows, d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix v = qr.householderQ() * Matrix::Identity(rows, d);
  std::vector<Matrix> kraus;
  for (std::size_t k = 0; k < n_kraus; ++k) {
    kraus.push_back(v.block(static_cast<Eigen::Index>(k) * d, 0, d, d));
  }
  return DenseChannel(n_qubits, std::move(kraus));
}

}  // namespace qfilter
