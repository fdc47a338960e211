#include "qfilter/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace qfilter {

namespace {

cplx i_pow(unsigned k) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[k & 3u];
}

FilterOutcome make_outcome(std::string label, std::size_t n, const PauliChannel::Map& weights) {
  double total = 0.0;
  PauliChannel ch = PauliChannel::normalized(n, weights, &total);
  return {std::move(label), std::move(ch), total};
}

const Matrix& pauli1(Pauli1 p) {
  static const Matrix m[4] = {
      pauli_matrix(PauliString::from_text("I")), pauli_matrix(PauliString::from_text("X")),
      pauli_matrix(PauliString::from_text("Z")), pauli_matrix(PauliString::from_text("Y"))};
  return m[static_cast<int>(p)];
}

}  // namespace

std::array<FilterOutcome, 2> commutation_filter(const PauliChannel& ch, const PauliString& probe) {
  if (probe.n_qubits() != ch.n_qubits()) {
    throw std::invalid_argument("commutation_filter: probe has wrong qubit count");
  }
  PauliChannel::Map keep, flip;
  for (const auto& [p, v] : ch.probs()) (commutes(p, probe) ? keep : flip)[p] = v;
  return {make_outcome("0", ch.n_qubits(), keep), make_outcome("1", ch.n_qubits(), flip)};
}

FilterOutcome successive_filtration(const PauliChannel& ch, const std::vector<PauliString>& probes,
                                    const std::vector<int>& postselect) {
  if (probes.size() != postselect.size()) {
    throw std::invalid_argument("successive_filtration: one post-selected bit per probe");
  }
  FilterOutcome out{"", ch, 1.0};
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (postselect[k] != 0 && postselect[k] != 1) {
      throw std::invalid_argument("successive_filtration: post-selected bits must be 0 or 1");
    }
    auto branches = commutation_filter(out.channel, probes[k]);
    FilterOutcome& b = branches[static_cast<std::size_t>(postselect[k])];
    if (b.probability == 0.0) {
      throw std::invalid_argument("successive_filtration: inconsistent post-selection");
    }
    out.label += b.label;
    out.channel = std::move(b.channel);
    out.probability *= b.probability;
  }
  return out;
}

CorrectionResult channel_correction(const PauliChannel& ch) {
  const std::size_t n = ch.n_qubits();
  PauliChannel::Map out;
  CorrectionResult result;
  for (const auto& [p, v] : ch.probs()) {
    std::string label;
    PauliString correction(n);
    for (std::size_t q = 0; q < n; ++q) {
      const bool u0 = !commutes(p, PauliString::single(n, q, Pauli1::Z));
      const bool u1 = !commutes(p, PauliString::single(n, q, Pauli1::X));
      label += u0 ? '1' : '0';
      label += u1 ? '1' : '0';
      if (u0) correction = multiply(correction, PauliString::single(n, q, Pauli1::X));
      if (u1) correction = multiply(correction, PauliString::single(n, q, Pauli1::Z));
    }
    result.syndrome[label] += v;
    out[multiply(correction, p).phase_free()] += v;
  }
  result.channel = PauliChannel::normalized(n, out);
  return result;
}

std::array<Matrix, 4> correction_superkraus_apply(const Matrix& e) {
  if (e.rows() != 2 || e.cols() != 2) {
    throw std::invalid_argument("correction_superkraus_apply: expected a 2x2 operator");
  }
  const Matrix& x = pauli1(Pauli1::X);
  const Matrix& z = pauli1(Pauli1::Z);
  const Matrix fz[2] = {(e + z * e * z) / 2, x * (e - z * e * z) / 2};
  std::array<Matrix, 4> out;
  for (int u0 = 0; u0 < 2; ++u0) {
    const Matrix& a = fz[u0];
    out[2 * u0 + 0] = (a + x * a * x) / 2;
    out[2 * u0 + 1] = z * (a - x * a * x) / 2;
  }
  return out;
}

std::size_t GeneralFilterSpec::n_qubits() const {
  return pairs.empty() ? 0 : pairs.front().first.n_qubits();
}

void GeneralFilterSpec::validate() const {
  const std::size_t m = pairs.size();
  if (m == 0) throw std::invalid_argument("GeneralFilterSpec: no Pauli pairs");
  if (weights.size() != m) {
    throw std::invalid_argument("GeneralFilterSpec: one weight per Pauli pair");
  }
  const std::size_t n = n_qubits();
  long double total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (pairs[i].first.n_qubits() != n || pairs[i].second.n_qubits() != n) {
      throw std::invalid_argument("GeneralFilterSpec: Paulis must share a qubit count");
    }
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("GeneralFilterSpec: negative weight");
    total += weights[i];
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance) {
    throw std::invalid_argument("GeneralFilterSpec: weights must sum to 1");
  }
  if (prepare) {
    const Matrix& v = *prepare;
    const auto mm = static_cast<Eigen::Index>(m);
    if (v.rows() != mm || v.cols() != mm) {
      throw std::invalid_argument("GeneralFilterSpec: prepare matrix must be m x m");
    }
    if ((v.adjoint() * v - Matrix::Identity(mm, mm)).norm() > 1e-10) {
      throw std::invalid_argument("GeneralFilterSpec: prepare matrix is not unitary");
    }
    for (Eigen::Index i = 0; i < mm; ++i) {
      if (std::fabs(std::norm(v(i, 0)) - weights[static_cast<std::size_t>(i)]) > 1e-10) {
        throw std::invalid_argument("GeneralFilterSpec: |V_i0|^2 must equal the weights");
      }
    }
  }
}

nlohmann::json filter_spec_to_json(const GeneralFilterSpec& spec) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [p, q] : spec.pairs) pairs.push_back({p.str(), q.str()});
  nlohmann::json j = {{"weights", spec.weights}, {"pairs", pairs}};
  if (spec.prepare) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < spec.prepare->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < spec.prepare->cols(); ++c) {
        row.push_back({(*spec.prepare)(r, c).real(), (*spec.prepare)(r, c).imag()});
      }
      rows.push_back(row);
    }
    j["prepare"] = rows;
  }
  return j;
}

GeneralFilterSpec filter_spec_from_json(const nlohmann::json& j) {
  GeneralFilterSpec spec;
  spec.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& pair : j.at("pairs")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("filter spec: each pair must be [P, Q]");
    }
    spec.pairs.emplace_back(PauliString::from_text(pair[0].get<std::string>()),
                            PauliString::from_text(pair[1].get<std::string>()));
  }
  if (j.contains("prepare")) {
    const auto& rows = j.at("prepare");
    const auto m = static_cast<Eigen::Index>(rows.size());
    Matrix v(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != m) {
        throw std::invalid_argument("filter spec: prepare matrix must be square");
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        const auto& e = row[static_cast<std::size_t>(c)];
        v(r, c) = e.is_array() ? cplx(e.at(0).get<double>(), e.at(1).get<double>())
                               : cplx(e.get<double>(), 0.0);
      }
    }
    spec.prepare = v;
  }
  spec.validate();
  return spec;
}

cplx general_filter_scalar(const GeneralFilterSpec& spec, const PauliString& n, std::size_t j) {
  const std::size_t m = spec.pairs.size();
  if (j >= m) throw std::out_of_range("general_filter_scalar: outcome index out of range");
  if (!spec.prepare && j != 0) {
    throw std::invalid_argument("general_filter_scalar: outcomes j != 0 need a prepare matrix");
  }
  if (n.n_qubits() != spec.n_qubits()) {
    throw std::invalid_argument("general_filter_scalar: qubit count mismatch");
  }
  cplx c = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& [p, q] = spec.pairs[i];
    const PauliString r = multiply(multiply(q, n), p);
    if (r.x_words() != n.x_words() || r.z_words() != n.z_words()) {
      throw std::invalid_argument("filter not diagonal on Pauli components");
    }
    const cplx s = i_pow(r.phase_exp() + 4u - n.phase_exp());
    const auto ii = static_cast<Eigen::Index>(i);
    const cplx alpha = spec.prepare ? (*spec.prepare)(ii, 0) *
                                          std::conj((*spec.prepare)(ii, static_cast<Eigen::Index>(j)))
                                    : cplx(spec.weights[i], 0.0);
    c += alpha * s;
  }
  return c;
}

FilterOutcome general_filter_outcome(const PauliChannel& ch, const GeneralFilterSpec& spec,
                                     std::size_t j) {
  spec.validate();
  if (ch.n_qubits() != spec.n_qubits()) {
    throw std::invalid_argument("general_filter_outcome: qubit count mismatch");
  }
  PauliChannel::Map kept;
  for (const auto& [p, v] : ch.probs()) {
    const double w = v * std::norm(general_filter_scalar(spec, p, j));
    if (w > 0.0) kept[p] = w;
  }
  return make_outcome(std::to_string(j), ch.n_qubits(), kept);
}

GeneralFilterSpec ae_filter_spec(std::size_t n) {
  GeneralFilterSpec spec;
  for (Pauli1 p : {Pauli1::I, Pauli1::Z, Pauli1::X, Pauli1::Y}) {
    const PauliString s = PauliString::uniform(n, p);
    spec.pairs.emplace_back(s, s);
    spec.weights.push_back(0.25);
  }
  return spec;
}

bool ae_removes(const PauliString& p) {
  const PauliTypeCount t = type_count(p);
  const int odd = static_cast<int>(t.weight() & 1) + static_cast<int>(t.x_count & 1) +
                  static_cast<int>(t.y_count & 1) + static_cast<int>(t.z_count & 1);
  return odd == 2;
}

FilterOutcome ae_filter(const PauliChannel& ch) {
  const std::size_t n = ch.n_qubits();
  const GeneralFilterSpec spec = ae_filter_spec(n);
  PauliChannel::Map kept;
  for (const auto& [p, v] : ch.probs()) {
    const cplx c = general_filter_scalar(spec, p);
    const bool removed = ae_removes(p);
    if (std::abs(c - (removed ? 0.0 : 1.0)) > 1e-15) {
      throw std::logic_error("ae_filter: acceptance scalar disagrees with the removal rule");
    }
    if (!removed) kept[p] = v;
  }
  return make_outcome("00", n, kept);
}

}  // namespace qfilter
