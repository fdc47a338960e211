#include "qfilter/noisy_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "qfilter/rng.hpp"

namespace qfilter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMaxFrameQubits = 64;

GateKind controlled_kind(Pauli1 p) {
  switch (p) {
    case Pauli1::X: return GateKind::CX;
    case Pauli1::Y: return GateKind::CY;
    case Pauli1::Z: return GateKind::CZ;
    case Pauli1::I: break;
  }
  throw std::logic_error("controlled_kind: identity has no controlled gate");
}

std::vector<uint32_t> range_qubits(uint32_t begin, std::size_t count) {
  std::vector<uint32_t> qs(count);
  for (std::size_t i = 0; i < count; ++i) qs[i] = begin + static_cast<uint32_t>(i);
  return qs;
}

void require_rate(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": rate " + std::to_string(p) +
                                " outside [0, 1]");
  }
}

// Pauli frame over at most 64 qubits and 64 measurements.
struct Frame {
  uint64_t x = 0;
  uint64_t z = 0;
  uint64_t flips = 0;

  Frame& operator^=(const Frame& o) {
    x ^= o.x;
    z ^= o.z;
    flips ^= o.flips;
    return *this;
  }
};

void conj_frame(const Gate& g, uint64_t& x, uint64_t& z) {
  const uint64_t a = uint64_t{1} << g.q0;
  const uint64_t b = uint64_t{1} << g.q1;
  auto s_rule = [&](uint64_t t) {
    if (x & t) z ^= t;
  };
  auto cx_rule = [&]() {
    if (x & a) x ^= b;
    if (z & b) z ^= a;
  };
  switch (g.kind) {
    case GateKind::H:
      if (((x & a) != 0) != ((z & a) != 0)) {
        x ^= a;
        z ^= a;
      }
      break;
    case GateKind::S:
    case GateKind::SDG: s_rule(a); break;
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z: break;
    case GateKind::CX: cx_rule(); break;
    case GateKind::CY:
      s_rule(b);
      cx_rule();
      s_rule(b);
      break;
    case GateKind::CZ: {
      const bool xa = x & a, xb = x & b;
      if (xb) z ^= a;
      if (xa) z ^= b;
      break;
    }
  }
}

void require_frame_size(const NoisyCircuit& circ) {
  if (circ.n_qubits() > kMaxFrameQubits || circ.measurement_bits().size() > 64) {
    throw std::invalid_argument("Pauli-frame simulation supports at most 64 qubits and 64 measurements");
  }
}

// Forward propagation of a phase-free frame through elements [start, end).
Frame propagate(const NoisyCircuit& circ, std::size_t start, Frame f) {
  const auto& els = circ.elements();
  std::size_t measured = 0;
  for (std::size_t i = 0; i < start; ++i) {
    if (std::holds_alternative<MeasureX>(els[i])) ++measured;
  }
  for (std::size_t i = start; i < els.size(); ++i) {
    std::visit(overloaded{
                   [&](const Gate& g) { conj_frame(g, f.x, f.z); },
                   [](const FaultSite&) {},
                   [](const PauliNoise&) {},
                   [](const KrausNoise&) {
                     throw std::invalid_argument("Pauli-frame simulation cannot handle Kraus noise");
                   },
                   [](const DenseUnitary&) {
                     throw std::invalid_argument(
                         "Pauli-frame simulation cannot handle non-Clifford unitaries");
                   },
                   [&](const MeasureX& m) {
                     if ((f.z >> m.qubit) & 1u) f.flips |= uint64_t{1} << measured;
                     ++measured;
                   },
                   [&](const ConditionalPauli& c) {
                     if ((f.flips >> circ.bit_index(c.bit)) & 1u) {
                       f.x ^= c.pauli.x_mask();
                       f.z ^= c.pauli.z_mask();
                     }
                   },
               },
               els[i]);
  }
  return f;
}

Frame unit_fault(uint32_t q, Pauli1 p) {
  Frame f;
  const auto v = static_cast<uint8_t>(p);
  if (v & 1u) f.x = uint64_t{1} << q;
  if (v & 2u) f.z = uint64_t{1} << q;
  return f;
}

// GF(2)-linear effect of every fault location, grouped for sampling.
struct DepolGroup {
  double rate = 0.0;
  std::vector<std::array<Frame, 3>> slots;  // X, Y, Z
};

struct CategoricalSite {
  std::vector<double> cumulative;
  std::vector<Frame> effects;
};

struct CompiledCircuit {
  std::vector<DepolGroup> groups;
  std::vector<CategoricalSite> sites;
  uint64_t postselect_mask = 0;
  uint64_t system_mask = 0;
};

CompiledCircuit compile(const NoisyCircuit& circ) {
  require_frame_size(circ);
  if (!circ.pauli_frame_compatible()) {
    throw std::invalid_argument("monte_carlo: circuit has non-Pauli elements");
  }
  CompiledCircuit cc;
  const auto& els = circ.elements();
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (const auto* fs = std::get_if<FaultSite>(&els[i])) {
      if (fs->rate == 0.0) continue;
      auto it = std::find_if(cc.groups.begin(), cc.groups.end(),
                             [&](const DepolGroup& g) { return g.rate == fs->rate; });
      if (it == cc.groups.end()) {
        cc.groups.push_back({fs->rate, {}});
        it = cc.groups.end() - 1;
      }
      for (uint32_t q : fs->qubits) {
        const Frame ex = propagate(circ, i + 1, unit_fault(q, Pauli1::X));
        const Frame ez = propagate(circ, i + 1, unit_fault(q, Pauli1::Z));
        Frame ey = ex;
        ey ^= ez;
        it->slots.push_back({ex, ey, ez});
      }
    } else if (const auto* pn = std::get_if<PauliNoise>(&els[i])) {
      CategoricalSite site;
      double acc = 0.0;
      for (const auto& [p, v] : pn->channel.probs()) {
        Frame eff;
        for (std::size_t k = 0; k < pn->qubits.size(); ++k) {
          const Pauli1 l = p.get(k);
          if (l == Pauli1::I) continue;
          const uint8_t b = static_cast<uint8_t>(l);
          if (b & 1u) eff ^= propagate(circ, i + 1, unit_fault(pn->qubits[k], Pauli1::X));
          if (b & 2u) eff ^= propagate(circ, i + 1, unit_fault(pn->qubits[k], Pauli1::Z));
        }
        acc += v;
        site.cumulative.push_back(acc);
        site.effects.push_back(eff);
      }
      cc.sites.push_back(std::move(site));
    }
  }
  for (const auto& b : circ.postselected()) cc.postselect_mask |= uint64_t{1} << circ.bit_index(b);
  cc.system_mask = circ.n_system() >= 64 ? ~uint64_t{0} : (uint64_t{1} << circ.n_system()) - 1;
  return cc;
}

struct Tally {
  uint64_t accepted = 0;
  uint64_t identity = 0;
};

Tally run_shots(const CompiledCircuit& cc, uint64_t seed, uint64_t begin, uint64_t end) {
  Tally t;
  const uint64_t n_groups = cc.groups.size();
  std::vector<double> log1m(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) log1m[g] = std::log1p(-cc.groups[g].rate);
  for (uint64_t shot = begin; shot < end; ++shot) {
    Frame acc;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const DepolGroup& grp = cc.groups[g];
      SplitMix64 rng = SplitMix64::stream(seed, shot, g);
      const auto size = static_cast<double>(grp.slots.size());
      double pos = -1.0;
      while (true) {
        double skip = 0.0;
        if (grp.rate < 1.0) {
          const double u = 1.0 - rng.uniform();  // (0, 1]
          skip = std::floor(std::log(u) / log1m[g]);
        }
        pos += skip + 1.0;
        if (!(pos < size)) break;
        const auto k = std::min<uint64_t>(2, static_cast<uint64_t>(rng.uniform() * 3.0));
        acc ^= grp.slots[static_cast<std::size_t>(pos)][k];
      }
    }
    for (std::size_t s = 0; s < cc.sites.size(); ++s) {
      const CategoricalSite& site = cc.sites[s];
      SplitMix64 rng = SplitMix64::stream(seed, shot, n_groups + s);
      const double u = rng.uniform() * site.cumulative.back();
      auto it = std::upper_bound(site.cumulative.begin(), site.cumulative.end(), u);
      if (it == site.cumulative.end()) --it;
      acc ^= site.effects[static_cast<std::size_t>(it - site.cumulative.begin())];
    }
    if (acc.flips & cc.postselect_mask) continue;
    ++t.accepted;
    if (((acc.x | acc.z) & cc.system_mask) == 0) ++t.identity;
  }
  return t;
}

// Dense evolution helpers.
const Matrix& local_pauli(Pauli1 p) {
  static const Matrix m[4] = {
      pauli_matrix(PauliString::from_text("I")), pauli_matrix(PauliString::from_text("X")),
      pauli_matrix(PauliString::from_text("Z")), pauli_matrix(PauliString::from_text("Y"))};
  return m[static_cast<int>(p)];
}

void apply_channel(Matrix& rho, const std::vector<Matrix>& kraus, const std::vector<uint32_t>& qs) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const Matrix& k : kraus) {
    Matrix t = rho;
    apply_local(t, k, qs);
    out += t;
  }
  rho = std::move(out);
}

std::vector<Matrix> depolarizing_kraus(double r) {
  return {std::sqrt(1.0 - r) * local_pauli(Pauli1::I), std::sqrt(r / 3) * local_pauli(Pauli1::X),
          std::sqrt(r / 3) * local_pauli(Pauli1::Y), std::sqrt(r / 3) * local_pauli(Pauli1::Z)};
}

}  // namespace

// ---------------------------------------------------------------------------
// NoisyCircuit

NoisyCircuit::NoisyCircuit(std::size_t n_system, std::size_t n_ancilla)
    : n_system_(n_system), n_ancilla_(n_ancilla) {
  if (n_system == 0) throw std::invalid_argument("NoisyCircuit: need at least one system qubit");
}

uint32_t NoisyCircuit::ancilla(std::size_t k) const {
  if (k >= n_ancilla_) throw std::out_of_range("NoisyCircuit::ancilla: index out of range");
  return static_cast<uint32_t>(n_system_ + k);
}

void NoisyCircuit::add(Element e) {
  const std::size_t n = n_qubits();
  auto check_qubits = [&](const std::vector<uint32_t>& qs) {
    if (qs.empty()) throw std::invalid_argument("NoisyCircuit: element acts on no qubits");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (qs[i] >= n) throw std::out_of_range("NoisyCircuit: qubit index out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (qs[i] == qs[j]) throw std::invalid_argument("NoisyCircuit: repeated qubit");
      }
    }
  };
  std::visit(overloaded{
                 [&](Gate& g) {
                   if (!is_two_qubit(g.kind)) g.q1 = 0;
                   if (g.q0 >= n || (is_two_qubit(g.kind) && g.q1 >= n)) {
                     throw std::out_of_range("NoisyCircuit: gate qubit out of range");
                   }
                   if (is_two_qubit(g.kind) && g.q0 == g.q1) {
                     throw std::invalid_argument("NoisyCircuit: two-qubit gate operands must differ");
                   }
                 },
                 [&](const FaultSite& f) {
                   check_qubits(f.qubits);
                   require_rate(f.rate, "FaultSite");
                 },
                 [&](const PauliNoise& p) {
                   check_qubits(p.qubits);
                   if (p.channel.n_qubits() != p.qubits.size() || p.channel.empty()) {
                     throw std::invalid_argument("PauliNoise: channel does not match its qubits");
                   }
                 },
                 [&](const KrausNoise& k) {
                   check_qubits(k.qubits);
                   const auto d = static_cast<Eigen::Index>(std::size_t{1} << k.qubits.size());
                   Matrix sum = Matrix::Zero(d, d);
                   for (const Matrix& m : k.kraus) {
                     if (m.rows() != d || m.cols() != d) {
                       throw std::invalid_argument("KrausNoise: operator size mismatch");
                     }
                     sum += m.adjoint() * m;
                   }
                   if (k.kraus.empty() || (sum - Matrix::Identity(d, d)).norm() > 1e-10) {
                     throw std::invalid_argument("KrausNoise: not trace preserving");
                   }
                 },
                 [&](const DenseUnitary& u) {
                   check_qubits(u.qubits);
                   const auto d = static_cast<Eigen::Index>(std::size_t{1} << u.qubits.size());
                   if (u.u.rows() != d || u.u.cols() != d ||
                       (u.u.adjoint() * u.u - Matrix::Identity(d, d)).norm() > 1e-10) {
                     throw std::invalid_argument("DenseUnitary: not a unitary of matching size");
                   }
                 },
                 [&](const MeasureX& m) {
                   check_qubits({m.qubit});
                   if (m.bit.empty() || std::find(bits_.begin(), bits_.end(), m.bit) != bits_.end()) {
                     throw std::invalid_argument("MeasureX: bit names must be unique and non-empty");
                   }
                   bits_.push_back(m.bit);
                 },
                 [&](const ConditionalPauli& c) {
                   if (std::find(bits_.begin(), bits_.end(), c.bit) == bits_.end()) {
                     throw std::invalid_argument("ConditionalPauli: bit '" + c.bit +
                                                 "' is not produced by an earlier measurement");
                   }
                   if (c.pauli.n_qubits() != n) {
                     throw std::invalid_argument("ConditionalPauli: Pauli has wrong qubit count");
                   }
                 },
             },
             e);
  elements_.push_back(std::move(e));
}

void NoisyCircuit::add_gate(GateKind kind, uint32_t q0, uint32_t q1) { add(Gate{kind, q0, q1}); }

void NoisyCircuit::add_noisy_gate(GateKind kind, uint32_t control, uint32_t target, double pc,
                                  double pt) {
  if (!is_two_qubit(kind)) {
    throw std::invalid_argument("add_noisy_gate: expected a two-qubit gate");
  }
  add_gate(kind, control, target);
  add_fault({control}, pc);
  add_fault({target}, pt);
}

void NoisyCircuit::add_fault(std::vector<uint32_t> qubits, double rate, std::string label) {
  require_rate(rate, "add_fault");
  if (rate == 0.0 && label.empty()) return;
  add(FaultSite{std::move(qubits), rate, std::move(label)});
}

void NoisyCircuit::add_channel(const std::vector<uint32_t>& qubits, const LocalChannel& ch) {
  std::visit(overloaded{
                 [&](double r) { add_fault(qubits, r); },
                 [&](const PauliChannel& p) {
                   if (p.n_qubits() == qubits.size()) {
                     add(PauliNoise{qubits, p});
                   } else if (p.n_qubits() == 1) {
                     for (uint32_t q : qubits) add(PauliNoise{{q}, p});
                   } else {
                     throw std::invalid_argument("add_channel: Pauli channel size mismatch");
                   }
                 },
                 [&](const std::vector<Matrix>& kraus) {
                   if (kraus.empty()) throw std::invalid_argument("add_channel: empty Kraus set");
                   const auto rows = static_cast<std::size_t>(kraus.front().rows());
                   if (rows == (std::size_t{1} << qubits.size())) {
                     add(KrausNoise{qubits, kraus});
                   } else if (rows == 2) {
                     for (uint32_t q : qubits) add(KrausNoise{{q}, kraus});
                   } else {
                     throw std::invalid_argument("add_channel: Kraus size mismatch");
                   }
                 },
             },
             ch);
}

void NoisyCircuit::add_controlled_pauli(uint32_t control, const PauliString& p, double pc,
                                        double pt) {
  if (p.n_qubits() > n_qubits()) {
    throw std::invalid_argument("add_controlled_pauli: Pauli larger than the register");
  }
  if (!p.is_hermitian()) {
    throw std::invalid_argument("add_controlled_pauli: Pauli must be Hermitian");
  }
  for (std::size_t q = 0; q < p.n_qubits(); ++q) {
    const Pauli1 l = p.get(q);
    if (l == Pauli1::I) continue;
    if (q == control) throw std::invalid_argument("add_controlled_pauli: control in support");
    add_noisy_gate(controlled_kind(l), control, static_cast<uint32_t>(q), pc, pt);
  }
  if (p.sign_exponent() == 2) add_gate(GateKind::Z, control);
}

void NoisyCircuit::measure_x(uint32_t qubit, std::string bit) {
  add(MeasureX{qubit, std::move(bit)});
}

void NoisyCircuit::conditional(std::string bit, PauliString pauli) {
  add(ConditionalPauli{std::move(bit), std::move(pauli)});
}

void NoisyCircuit::postselect(const std::string& bit) {
  bit_index(bit);
  if (std::find(postselect_.begin(), postselect_.end(), bit) == postselect_.end()) {
    postselect_.push_back(bit);
  }
}

std::size_t NoisyCircuit::bit_index(const std::string& bit) const {
  auto it = std::find(bits_.begin(), bits_.end(), bit);
  if (it == bits_.end()) throw std::invalid_argument("unknown measurement bit '" + bit + "'");
  return static_cast<std::size_t>(it - bits_.begin());
}

bool NoisyCircuit::pauli_frame_compatible() const {
  return std::none_of(elements_.begin(), elements_.end(), [](const Element& e) {
    return std::holds_alternative<KrausNoise>(e) || std::holds_alternative<DenseUnitary>(e);
  });
}

std::size_t NoisyCircuit::count_faults() const {
  std::size_t total = 0;
  for (const Element& e : elements_) {
    if (const auto* f = std::get_if<FaultSite>(&e)) total += f->qubits.size();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Builders

NoisyCircuit build_correction_filter_circuit(std::size_t n, const CorrectionFilterNoise& noise) {
  if (n == 0) throw std::invalid_argument("build_correction_filter_circuit: n must be positive");
  require_rate(noise.pc, "build_correction_filter_circuit");
  require_rate(noise.pt, "build_correction_filter_circuit");
  NoisyCircuit c(n, 2 * n);
  for (uint32_t j = 0; j < n; ++j) {
    const uint32_t qx = c.ancilla(2 * j), qz = c.ancilla(2 * j + 1);
    c.add_gate(GateKind::H, qx);
    c.add_gate(GateKind::H, qz);
    c.add_noisy_gate(GateKind::CX, qx, j, noise.pc, noise.pt);
    c.add_noisy_gate(GateKind::CZ, qz, j, noise.pc, noise.pt);
    c.add_channel({j}, noise.channel);
    c.add_noisy_gate(GateKind::CZ, qz, j, noise.pc, noise.pt);
    c.add_noisy_gate(GateKind::CX, qx, j, noise.pc, noise.pt);
    c.measure_x(qz, "z" + std::to_string(j));
    c.measure_x(qx, "x" + std::to_string(j));
  }
  const std::size_t total = c.n_qubits();
  for (uint32_t j = 0; j < n; ++j) {
    c.conditional("z" + std::to_string(j), PauliString::single(total, j, Pauli1::X));
    c.conditional("x" + std::to_string(j), PauliString::single(total, j, Pauli1::Z));
  }
  return c;
}

NoisyCircuit build_fault_location_circuit(FilterAxis axis) {
  NoisyCircuit c(1, 1);
  const uint32_t r = 0, q = 1;
  const GateKind select = axis == FilterAxis::Z ? GateKind::CZ : GateKind::CX;
  const GateKind fix = axis == FilterAxis::Z ? GateKind::CX : GateKind::CZ;
  c.add_gate(GateKind::H, q);
  c.add_gate(select, q, r);
  c.add_fault({q}, 0.0, "A");
  c.add_fault({r}, 0.0, "B");
  c.add_gate(select, q, r);
  c.add_fault({q}, 0.0, "C");
  c.add_fault({r}, 0.0, "D");
  c.add_gate(GateKind::H, q);
  c.add_gate(fix, q, r);
  return c;
}

namespace {

void add_circuit_body(NoisyCircuit& nc, const CliffordCircuit& circ, double pc, double pt,
                      double idle, const std::vector<uint32_t>& idle_qubits) {
  if (idle == 0.0 || idle_qubits.empty()) {
    for (const Gate& g : circ.gates()) {
      if (is_two_qubit(g.kind)) {
        nc.add_noisy_gate(g.kind, g.q0, g.q1, pc, pt);
      } else {
        nc.add_gate(g.kind, g.q0);
      }
    }
    return;
  }
  // ASAP layering; gates inside a layer act on disjoint qubits.
  std::vector<std::size_t> busy(circ.n_qubits(), 0);
  std::vector<std::vector<Gate>> layers;
  for (const Gate& g : circ.gates()) {
    std::size_t layer = busy[g.q0];
    if (is_two_qubit(g.kind)) layer = std::max(layer, busy[g.q1]);
    if (layer >= layers.size()) layers.resize(layer + 1);
    layers[layer].push_back(g);
    busy[g.q0] = layer + 1;
    if (is_two_qubit(g.kind)) busy[g.q1] = layer + 1;
  }
  for (const auto& layer : layers) {
    for (const Gate& g : layer) {
      if (is_two_qubit(g.kind)) {
        nc.add_noisy_gate(g.kind, g.q0, g.q1, pc, pt);
      } else {
        nc.add_gate(g.kind, g.q0);
      }
    }
    nc.add_fault(idle_qubits, idle);
  }
}

}  // namespace

NoisyCircuit build_ae_filter_circuit(const CliffordCircuit& circ, const AeFilterNoise& noise,
                                     const std::optional<LocalChannel>& channel_after) {
  const std::size_t n = circ.n_qubits();
  if (n == 0) throw std::invalid_argument("build_ae_filter_circuit: empty register");
  for (double r : {noise.pc_filter, noise.pt_filter, noise.pc_circuit, noise.pt_circuit,
                   noise.idle_ancilla}) {
    require_rate(r, "build_ae_filter_circuit");
  }
  NoisyCircuit c(n, 2);
  const uint32_t az = c.ancilla(0), ax = c.ancilla(1);
  const std::size_t total = c.n_qubits();
  const CliffordTableau tab = tableau_from_circuit(circ);
  const PauliString zn = PauliString::uniform(n, Pauli1::Z);
  const PauliString xn = PauliString::uniform(n, Pauli1::X);
  auto widen = [&](const PauliString& p) {
    PauliString w(total);
    for (std::size_t q = 0; q < n; ++q) w.set(q, p.get(q));
    if (p.sign_exponent() == 2) w.set_phase_exp(w.phase_exp() + 2);
    return w;
  };

  c.add_gate(GateKind::H, az);
  c.add_gate(GateKind::H, ax);
  c.add_controlled_pauli(az, widen(tab.backward(zn)), noise.pc_filter, noise.pt_filter);
  c.add_controlled_pauli(ax, widen(tab.backward(xn)), noise.pc_filter, noise.pt_filter);
  add_circuit_body(c, circ, noise.pc_circuit, noise.pt_circuit, noise.idle_ancilla, {az, ax});
  if (channel_after) c.add_channel(range_qubits(0, n), *channel_after);
  c.add_controlled_pauli(ax, widen(xn), noise.pc_filter, noise.pt_filter);
  c.add_controlled_pauli(az, widen(zn), noise.pc_filter, noise.pt_filter);
  c.measure_x(az, "a_z");
  c.measure_x(ax, "a_x");
  c.postselect("a_z");
  c.postselect("a_x");
  return c;
}

NoisyCircuit build_noisy_circuit(const CliffordCircuit& circ, double pc, double pt,
                                 const std::optional<LocalChannel>& channel_after) {
  require_rate(pc, "build_noisy_circuit");
  require_rate(pt, "build_noisy_circuit");
  NoisyCircuit c(circ.n_qubits(), 0);
  add_circuit_body(c, circ, pc, pt, 0.0, {});
  if (channel_after) c.add_channel(range_qubits(0, circ.n_qubits()), *channel_after);
  return c;
}

NoisyCircuit build_commutation_filter_circuit(const std::vector<PauliString>& probes,
                                              const LocalChannel& channel, double pc, double pt) {
  if (probes.empty()) throw std::invalid_argument("build_commutation_filter_circuit: no probes");
  const std::size_t n = probes.front().n_qubits();
  const std::size_t m = probes.size();
  NoisyCircuit c(n, m);
  std::vector<PauliString> wide;
  for (const PauliString& p : probes) {
    if (p.n_qubits() != n) {
      throw std::invalid_argument("build_commutation_filter_circuit: probe size mismatch");
    }
    PauliString w(c.n_qubits());
    for (std::size_t q = 0; q < n; ++q) w.set(q, p.get(q));
    wide.push_back(w);
  }
  for (std::size_t k = 0; k < m; ++k) c.add_gate(GateKind::H, c.ancilla(k));
  for (std::size_t k = m; k-- > 0;) c.add_controlled_pauli(c.ancilla(k), wide[k], pc, pt);
  c.add_channel(range_qubits(0, n), channel);
  for (std::size_t k = 0; k < m; ++k) c.add_controlled_pauli(c.ancilla(k), wide[k], pc, pt);
  for (std::size_t k = 0; k < m; ++k) c.measure_x(c.ancilla(k), "m" + std::to_string(k));
  return c;
}

NoisyCircuit build_t_filter_circuit(const Pauli1Probs& noise, bool y_feedback, bool undo_t) {
  NoisyCircuit c(1, 1);
  const uint32_t r = 0, q = 1;
  if (undo_t) c.add(DenseUnitary{{r}, t_gate().adjoint(), "TDG"});
  c.add_gate(GateKind::H, q);
  c.add_gate(GateKind::CZ, q, r);
  c.add(DenseUnitary{{r}, t_gate(), "T"});
  c.add_channel({r}, product_channel(1, noise));
  c.add_gate(GateKind::CZ, q, r);
  c.measure_x(q, "m");
  c.conditional("m", PauliString::single(2, r, y_feedback ? Pauli1::Y : Pauli1::X));
  return c;
}

NoisyCircuit build_ccz_filter_circuit(const Pauli1Probs& noise, bool undo_ccz) {
  NoisyCircuit c(3, 3);
  const std::vector<uint32_t> sys{0, 1, 2};
  const PauliChannel local = product_channel(1, noise);
  if (undo_ccz) c.add(DenseUnitary{sys, ccz_gate(), "CCZ"});
  for (uint32_t j = 0; j < 3; ++j) c.add_gate(GateKind::H, c.ancilla(j));
  for (uint32_t j = 0; j < 3; ++j) c.add_gate(GateKind::CZ, c.ancilla(j), j);
  c.add(DenseUnitary{sys, ccz_gate(), "CCZ"});
  c.add_channel(sys, local);
  for (uint32_t j = 0; j < 3; ++j) c.add_gate(GateKind::CZ, c.ancilla(j), j);
  for (uint32_t j = 0; j < 3; ++j) c.measure_x(c.ancilla(j), "m" + std::to_string(j));
  for (uint32_t j = 0; j < 3; ++j) {
    c.conditional("m" + std::to_string(j), PauliString::single(6, j, Pauli1::X));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Fault propagation and Monte Carlo

FaultPropagation propagate_fault(const NoisyCircuit& circ, std::size_t site,
                                 const PauliString& fault) {
  require_frame_size(circ);
  if (site >= circ.elements().size()) throw std::out_of_range("propagate_fault: site out of range");
  if (fault.n_qubits() != circ.n_qubits()) {
    throw std::invalid_argument("propagate_fault: fault has wrong qubit count");
  }
  const Frame f = propagate(circ, site + 1, Frame{fault.x_mask(), fault.z_mask(), 0});
  FaultPropagation out{PauliString::from_masks(circ.n_qubits(), f.x, f.z), {}};
  for (std::size_t k = 0; k < circ.measurement_bits().size(); ++k) {
    out.flips.push_back((f.flips >> k) & 1u);
  }
  return out;
}

double SimResult::fidelity_estimate() const {
  return accepted == 0 ? 0.0 : static_cast<double>(identity_residual) / static_cast<double>(accepted);
}

double SimResult::postselect_rate() const {
  return shots == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(shots);
}

double SimResult::fidelity_stderr() const {
  if (accepted == 0) return 0.0;
  const double f = fidelity_estimate();
  return std::sqrt(f * (1.0 - f) / static_cast<double>(accepted));
}

double SimResult::postselect_stderr() const {
  if (shots == 0) return 0.0;
  const double r = postselect_rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(shots));
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("QFILTER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    throw std::invalid_argument("QFILTER_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SimResult monte_carlo(const NoisyCircuit& circ, uint64_t shots, uint64_t seed, std::size_t threads) {
  if (shots == 0) throw std::invalid_argument("monte_carlo: shots must be positive");
  const CompiledCircuit cc = compile(circ);
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<std::size_t>(std::min<uint64_t>(threads, shots));
  std::vector<Tally> tallies(threads);
  if (threads == 1) {
    tallies[0] = run_shots(cc, seed, 0, shots);
  } else {
    std::vector<std::thread> pool;
    const uint64_t chunk = shots / threads, extra = shots % threads;
    uint64_t begin = 0;
    for (std::size_t t = 0; t < threads; ++t) {
      const uint64_t end = begin + chunk + (t < extra ? 1 : 0);
      pool.emplace_back([&, t, begin, end] { tallies[t] = run_shots(cc, seed, begin, end); });
      begin = end;
    }
    for (auto& th : pool) th.join();
  }
  SimResult r{shots, 0, 0, seed};
  for (const Tally& t : tallies) {
    r.accepted += t.accepted;
    r.identity_residual += t.identity;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dense oracle

Superoperator DenseRunResult::channel() const {
  if (accept_probability <= 0.0) throw std::domain_error("DenseRunResult: nothing accepted");
  return {accepted.n_qubits, accepted.m / accept_probability};
}

Superoperator DenseRunResult::branch_channel(const std::string& outcome) const {
  auto it = branches.find(outcome);
  const double p = branch_probabilities.at(outcome);
  if (it == branches.end() || p <= 0.0) {
    throw std::domain_error("DenseRunResult: branch '" + outcome + "' has probability zero");
  }
  return {it->second.n_qubits, it->second.m / p};
}

DenseRunResult dense_oracle_run(const NoisyCircuit& circ) {
  const std::size_t n = circ.n_qubits();
  const std::size_t ns = circ.n_system();
  if (n > kMaxDenseQubits || ns > kMaxDenseChannelQubits) {
    throw std::invalid_argument("dense_oracle_run: at most " + std::to_string(kMaxDenseQubits) +
                                " qubits in total and " + std::to_string(kMaxDenseChannelQubits) +
                                " system qubits");
  }
  const std::size_t d = std::size_t{1} << n;
  const std::size_t ds = std::size_t{1} << ns;
  const std::size_t n_bits = circ.measurement_bits().size();
  const auto& els = circ.elements();

  // Pre-resolve element data that is reused for every input.
  std::vector<std::vector<Matrix>> kraus_of(els.size());
  std::vector<std::vector<uint32_t>> qubits_of(els.size());
  std::vector<Matrix> full_pauli(els.size());
  std::vector<std::size_t> cond_bit(els.size(), 0);
  for (std::size_t i = 0; i < els.size(); ++i) {
    std::visit(overloaded{
                   [&](const Gate& g) {
                     qubits_of[i] = {g.q0};
                     if (is_two_qubit(g.kind)) qubits_of[i].push_back(g.q1);
                     kraus_of[i] = {gate_matrix(g.kind)};
                   },
                   [&](const FaultSite& f) {
                     qubits_of[i] = f.qubits;
                     kraus_of[i] = depolarizing_kraus(f.rate);
                   },
                   [&](const PauliNoise& p) {
                     qubits_of[i] = p.qubits;
                     for (const auto& [pp, v] : p.channel.probs()) {
                       kraus_of[i].push_back(std::sqrt(v) * pauli_matrix(pp));
                     }
                   },
                   [&](const KrausNoise& k) {
                     qubits_of[i] = k.qubits;
                     kraus_of[i] = k.kraus;
                   },
                   [&](const DenseUnitary& u) {
                     qubits_of[i] = u.qubits;
                     kraus_of[i] = {u.u};
                   },
                   [&](const MeasureX& m) { qubits_of[i] = {m.qubit}; },
                   [&](const ConditionalPauli& c) {
                     full_pauli[i] = pauli_matrix(c.pauli);
                     cond_bit[i] = circ.bit_index(c.bit);
                   },
               },
               els[i]);
  }
  const Matrix plus = (local_pauli(Pauli1::I) + local_pauli(Pauli1::X)) / 2;
  const Matrix minus = (local_pauli(Pauli1::I) - local_pauli(Pauli1::X)) / 2;

  std::map<uint64_t, Matrix> branch_maps;
  auto sys_dim = static_cast<Eigen::Index>(ds * ds);
  for (std::size_t i = 0; i < ds; ++i) {
    for (std::size_t j = 0; j < ds; ++j) {
      std::map<uint64_t, Matrix> rhos;
      Matrix rho0 = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      rho0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      rhos.emplace(0, std::move(rho0));
      std::size_t measured = 0;
      for (std::size_t e = 0; e < els.size(); ++e) {
        if (const auto* m = std::get_if<MeasureX>(&els[e])) {
          std::map<uint64_t, Matrix> next;
          for (auto& [mask, rho] : rhos) {
            Matrix r1 = rho;
            apply_local(rho, plus, {m->qubit});
            apply_local(r1, minus, {m->qubit});
            next.emplace(mask, std::move(rho));
            next.emplace(mask | (uint64_t{1} << measured), std::move(r1));
          }
          rhos = std::move(next);
          ++measured;
        } else if (std::holds_alternative<ConditionalPauli>(els[e])) {
          for (auto& [mask, rho] : rhos) {
            if ((mask >> cond_bit[e]) & 1u) rho = full_pauli[e] * rho * full_pauli[e].adjoint();
          }
        } else if (kraus_of[e].size() == 1) {
          for (auto& [mask, rho] : rhos) apply_local(rho, kraus_of[e][0], qubits_of[e]);
        } else {
          for (auto& [mask, rho] : rhos) {
            if (std::holds_alternative<FaultSite>(els[e])) {
              for (uint32_t q : qubits_of[e]) apply_channel(rho, kraus_of[e], {q});
            } else {
              apply_channel(rho, kraus_of[e], qubits_of[e]);
            }
          }
        }
      }
      const auto col = static_cast<Eigen::Index>(i + ds * j);
      for (const auto& [mask, rho] : rhos) {
        auto it = branch_maps.find(mask);
        if (it == branch_maps.end()) {
          it = branch_maps.emplace(mask, Matrix::Zero(sys_dim, sys_dim)).first;
        }
        // Partial trace over the ancillas (high bits of the index).
        for (std::size_t a = 0; a < ds; ++a) {
          for (std::size_t b = 0; b < ds; ++b) {
            cplx acc = 0;
            for (std::size_t k = 0; k < d / ds; ++k) {
              acc += rho(static_cast<Eigen::Index>(a + k * ds), static_cast<Eigen::Index>(b + k * ds));
            }
            it->second(static_cast<Eigen::Index>(a + ds * b), col) = acc;
          }
        }
      }
    }
  }

  DenseRunResult out;
  out.n_system = ns;
  out.accepted = Superoperator{ns, Matrix::Zero(sys_dim, sys_dim)};
  uint64_t post_mask = 0;
  for (const auto& b : circ.postselected()) post_mask |= uint64_t{1} << circ.bit_index(b);
  for (auto& [mask, m] : branch_maps) {
    std::string label;
    for (std::size_t k = 0; k < n_bits; ++k) label += ((mask >> k) & 1u) ? '1' : '0';
    cplx trace = 0;
    for (std::size_t i = 0; i < ds; ++i) {
      const auto col = static_cast<Eigen::Index>(i + ds * i);
      for (std::size_t a = 0; a < ds; ++a) trace += m(static_cast<Eigen::Index>(a + ds * a), col);
    }
    const double p = trace.real() / static_cast<double>(ds);
    if ((mask & post_mask) == 0) {
      out.accepted.m += m;
      out.accept_probability += p;
    }
    out.branch_probabilities[label] = p;
    out.branches.emplace(label, Superoperator{ns, std::move(m)});
  }
  return out;
}

}  // namespace qfilter
