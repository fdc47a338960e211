#include "qfilter/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "qfilter/dense.hpp"
#include "qfilter/rng.hpp"

namespace qfilter {

using nlohmann::json;

std::string config_hash(const json& canonical) {
  const std::string s = canonical.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

uint64_t derive_seed(uint64_t master, const std::string& key) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64::mix(SplitMix64::mix(master) ^ h);
}

std::string format_double(double v) { return fmt::format("{}", v); }

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw std::invalid_argument(what + " config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw std::invalid_argument(what + " config: unknown key '" + k + "'");
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void require_rates(const std::vector<double>& grid, const std::string& what) {
  if (grid.empty()) throw std::invalid_argument(what + " must not be empty");
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(what + " entries must lie in [0, 1]");
  }
}

void require_shots(uint64_t shots, uint64_t min_shots = 1000) {
  if (shots < min_shots) {
    throw std::invalid_argument(fmt::format("shots must be at least {}", min_shots));
  }
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  s += '\n';
  return s;
}

json sim_json(const SimResult& r) {
  return {{"shots", r.shots},
          {"accepted", r.accepted},
          {"identity_residual", r.identity_residual},
          {"seed", r.seed},
          {"fidelity", r.fidelity_estimate()},
          {"fidelity_stderr", r.fidelity_stderr()},
          {"postselect_rate", r.postselect_rate()},
          {"postselect_stderr", r.postselect_stderr()}};
}

json summary_base(const std::string& name, const json& config, const std::string& hash) {
  return {{"experiment", name}, {"config", config}, {"config_hash", hash}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Fig5

Fig5Config Fig5Config::from_json(const json& j) {
  check_keys(j, {"n", "pc_grid", "pt_grid", "channel_rate", "shots", "seed"}, "fig5");
  Fig5Config c;
  read_opt(j, "n", c.n);
  read_opt(j, "pc_grid", c.pc_grid);
  read_opt(j, "pt_grid", c.pt_grid);
  read_opt(j, "channel_rate", c.channel_rate);
  read_opt(j, "shots", c.shots);
  read_opt(j, "seed", c.seed);
  return c;
}

json Fig5Config::to_json() const {
  return {{"n", n},           {"pc_grid", pc_grid}, {"pt_grid", pt_grid},
          {"channel_rate", channel_rate}, {"shots", shots},     {"seed", seed}};
}

const Fig5Cell& Fig5Result::at(double pc, double pt) const {
  for (const auto& c : cells) {
    if (c.pc == pc && c.pt == pt) return c;
  }
  throw std::out_of_range("fig5: no cell at the requested rates");
}

Fig5Result run_fig5(const Fig5Config& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("fig5: n must be positive");
  require_rates(cfg.pc_grid, "fig5 pc_grid");
  require_rates(cfg.pt_grid, "fig5 pt_grid");
  require_shots(cfg.shots);
  Fig5Result r{cfg, config_hash(cfg.to_json()), {}};
  for (double pc : cfg.pc_grid) {
    for (double pt : cfg.pt_grid) {
      const NoisyCircuit circ =
          build_correction_filter_circuit(cfg.n, {pc, pt, LocalChannel(cfg.channel_rate)});
      const uint64_t seed = derive_seed(cfg.seed, fmt::format("fig5/{}/{}", pc, pt));
      r.cells.push_back({pc, pt, monte_carlo(circ, cfg.shots, seed), 0.0});
    }
  }
  for (auto& c : r.cells) {
    const double pm = std::max(c.pc, c.pt);
    const auto ref = std::find_if(r.cells.begin(), r.cells.end(),
                                  [&](const Fig5Cell& o) { return o.pc == pm && o.pt == pm; });
    c.delta_f = ref == r.cells.end() ? std::nan("")
                                     : c.sim.fidelity_estimate() - ref->sim.fidelity_estimate();
  }
  return r;
}

ExperimentOutput fig5_output(const Fig5Result& r) {
  ExperimentOutput out{"fig5", "", summary_base("fig5", r.config.to_json(), r.hash)};
  out.csv = join({"config_hash", "seed", "pc", "pt", "fidelity", "delta_f", "stderr",
                  "postselect_rate", "shots"});
  json cells = json::array();
  for (const auto& c : r.cells) {
    out.csv += join({r.hash, std::to_string(c.sim.seed), format_double(c.pc),
                     format_double(c.pt), format_double(c.sim.fidelity_estimate()),
                     format_double(c.delta_f), format_double(c.sim.fidelity_stderr()),
                     format_double(c.sim.postselect_rate()), std::to_string(c.sim.shots)});
    json cj = sim_json(c.sim);
    cj["pc"] = c.pc;
    cj["pt"] = c.pt;
    cj["delta_f"] = c.delta_f;
    cells.push_back(cj);
  }
  out.summary["cells"] = cells;
  return out;
}

// ---------------------------------------------------------------------------
// Fig6

std::string variant_name(Fig6Variant v) {
  switch (v) {
    case Fig6Variant::SameNoise: return "same_noise";
    case Fig6Variant::CleanFilterPartial: return "clean_filter_partial";
    case Fig6Variant::NoiselessFilter: return "noiseless_filter";
  }
  throw std::invalid_argument("unknown fig6 variant");
}

Fig6Variant variant_from_name(const std::string& s) {
  for (auto v : {Fig6Variant::SameNoise, Fig6Variant::CleanFilterPartial,
                 Fig6Variant::NoiselessFilter}) {
    if (variant_name(v) == s) return v;
  }
  throw std::invalid_argument("unknown fig6 variant '" + s + "'");
}

Fig6Config Fig6Config::from_json(const json& j) {
  check_keys(j,
             {"n", "depth_min", "depth_max", "p_grid", "variants", "other_rate", "shots", "seed"},
             "fig6");
  Fig6Config c;
  read_opt(j, "n", c.n);
  read_opt(j, "depth_min", c.depth_min);
  read_opt(j, "depth_max", c.depth_max);
  read_opt(j, "p_grid", c.p_grid);
  read_opt(j, "other_rate", c.other_rate);
  read_opt(j, "shots", c.shots);
  read_opt(j, "seed", c.seed);
  if (j.contains("variants")) {
    c.variants.clear();
    for (const auto& s : j.at("variants")) c.variants.push_back(variant_from_name(s.get<std::string>()));
  }
  return c;
}

json Fig6Config::to_json() const {
  json vs = json::array();
  for (auto v : variants) vs.push_back(variant_name(v));
  return {{"n", n},         {"depth_min", depth_min},   {"depth_max", depth_max},
          {"p_grid", p_grid}, {"variants", vs},       {"other_rate", other_rate},
          {"shots", shots}, {"seed", seed}};
}

AeFilterNoise fig6_noise(Fig6Variant v, double p, double other_rate) {
  switch (v) {
    case Fig6Variant::SameNoise: return {p, p, p, p, 0.0};
    case Fig6Variant::CleanFilterPartial: return {p, other_rate, other_rate, other_rate, 0.0};
    case Fig6Variant::NoiselessFilter: return {0.0, 0.0, p, p, 0.0};
  }
  throw std::invalid_argument("unknown fig6 variant");
}

double Fig6Cell::gain() const {
  const double fo = original.fidelity_estimate();
  return fo > 0.0 ? filtered.fidelity_estimate() / fo : 0.0;
}

double Fig6Cell::sigma() const {
  return std::hypot(original.fidelity_stderr(), filtered.fidelity_stderr());
}

std::vector<const Fig6Cell*> Fig6Result::series(Fig6Variant v, double p) const {
  std::vector<const Fig6Cell*> s;
  for (const auto& c : cells) {
    if (c.variant == v && c.p == p) s.push_back(&c);
  }
  std::sort(s.begin(), s.end(), [](auto* a, auto* b) { return a->depth < b->depth; });
  return s;
}

std::optional<std::size_t> Fig6Result::crossover(Fig6Variant v, double p) const {
  for (const Fig6Cell* c : series(v, p)) {
    if (c->filtered.fidelity_estimate() - c->original.fidelity_estimate() > 2.0 * c->sigma()) {
      return c->depth;
    }
  }
  return std::nullopt;
}

Fig6Result run_fig6(const Fig6Config& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("fig6: n must be at least 2");
  if (cfg.depth_min == 0 || cfg.depth_max < cfg.depth_min) {
    throw std::invalid_argument("fig6: need 1 <= depth_min <= depth_max");
  }
  require_rates(cfg.p_grid, "fig6 p_grid");
  require_rates({cfg.other_rate}, "fig6 other_rate");
  if (cfg.variants.empty()) throw std::invalid_argument("fig6: variants must not be empty");
  require_shots(cfg.shots);

  Fig6Result r{cfg, config_hash(cfg.to_json()), {}};
  std::map<std::string, SimResult> originals;
  for (Fig6Variant v : cfg.variants) {
    for (double p : cfg.p_grid) {
      const AeFilterNoise noise = fig6_noise(v, p, cfg.other_rate);
      for (std::size_t d = cfg.depth_min; d <= cfg.depth_max; ++d) {
        const CliffordCircuit circ = brickwork_circuit(cfg.n, d);
        const std::string okey =
            fmt::format("fig6/original/{}/{}/{}", noise.pc_circuit, noise.pt_circuit, d);
        auto it = originals.find(okey);
        if (it == originals.end()) {
          const NoisyCircuit orig = build_noisy_circuit(circ, noise.pc_circuit, noise.pt_circuit);
          it = originals.emplace(okey, monte_carlo(orig, cfg.shots, derive_seed(cfg.seed, okey)))
                   .first;
        }
        const std::string fkey = fmt::format("fig6/filtered/{}/{}/{}", variant_name(v), p, d);
        const NoisyCircuit filt = build_ae_filter_circuit(circ, noise);
        r.cells.push_back(
            {v, p, d, it->second, monte_carlo(filt, cfg.shots, derive_seed(cfg.seed, fkey))});
      }
    }
  }
  return r;
}

ExperimentOutput fig6_output(const Fig6Result& r) {
  ExperimentOutput out{"fig6", "", summary_base("fig6", r.config.to_json(), r.hash)};
  out.csv = join({"config_hash", "seed", "variant", "p", "depth", "fidelity_original",
                  "stderr_original", "fidelity_filtered", "stderr_filtered", "postselect_rate",
                  "postselect_stderr", "gain"});
  for (const auto& c : r.cells) {
    out.csv += join({r.hash, std::to_string(c.filtered.seed), variant_name(c.variant),
                     format_double(c.p), std::to_string(c.depth),
                     format_double(c.original.fidelity_estimate()),
                     format_double(c.original.fidelity_stderr()),
                     format_double(c.filtered.fidelity_estimate()),
                     format_double(c.filtered.fidelity_stderr()),
                     format_double(c.filtered.postselect_rate()),
                     format_double(c.filtered.postselect_stderr()), format_double(c.gain())});
  }
  json cross = json::array();
  for (Fig6Variant v : r.config.variants) {
    for (double p : r.config.p_grid) {
      const auto d = r.crossover(v, p);
      cross.push_back({{"variant", variant_name(v)},
                       {"p", p},
                       {"crossover_depth", d ? json(*d) : json(nullptr)}});
    }
  }
  out.summary["crossover"] = cross;
  // Weights of the backward-propagated Z^n and X^n selects, one entry per depth.
  json weights = json::array();
  const PauliString zn = PauliString::from_text(std::string(r.config.n, 'Z'));
  const PauliString xn = PauliString::from_text(std::string(r.config.n, 'X'));
  for (std::size_t d = r.config.depth_min; d <= r.config.depth_max; ++d) {
    const CliffordTableau t = tableau_from_circuit(brickwork_circuit(r.config.n, d));
    weights.push_back({{"depth", d},
                       {"z_select", weight(conjugate_backward(t, zn))},
                       {"x_select", weight(conjugate_backward(t, xn))}});
  }
  out.summary["select_weight"] = weights;
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

BoundsConfig BoundsConfig::from_json(const json& j) {
  check_keys(j, {"n_max", "p_grid", "eps_grid", "seed"}, "bounds");
  BoundsConfig c;
  read_opt(j, "n_max", c.n_max);
  read_opt(j, "p_grid", c.p_grid);
  read_opt(j, "eps_grid", c.eps_grid);
  read_opt(j, "seed", c.seed);
  return c;
}

json BoundsConfig::to_json() const {
  return {{"n_max", n_max}, {"p_grid", p_grid}, {"eps_grid", eps_grid}, {"seed", seed}};
}

std::vector<BoundsRow> run_bounds(const BoundsConfig& cfg) {
  if (cfg.n_max < 2 || cfg.n_max > 40) throw std::invalid_argument("bounds: n_max must be in [2, 40]");
  require_rates(cfg.p_grid, "bounds p_grid");
  require_rates(cfg.eps_grid, "bounds eps_grid");
  using D = BoundReport::Direction;
  std::vector<BoundsRow> rows;
  for (std::size_t n = 1; n <= cfg.n_max; ++n) {
    for (std::size_t w = 1; w <= n; ++w) {
      const double exact = static_cast<double>(removed_count_exact(n, w));
      const std::map<std::string, double> par{{"n", double(n)}, {"w", double(w)}};
      rows.push_back({"removed_count", n, 0.0, w,
                      make_report("removed_count", par, D::Lower,
                                  removed_count_lower_bound(n, w), exact)});
      rows.push_back({"removed_count_w2", n, 0.0, w,
                      make_report("removed_count_w2", par, D::Lower,
                                  removed_count_lower_bound_w2(n, w), exact)});
    }
  }
  for (std::size_t n = 2; n <= cfg.n_max; ++n) {
    for (double p : cfg.p_grid) {
      const SymmetricFilterStats s = symmetric_channel_engine(n, {1 - p, p / 3, p / 3, p / 3});
      const std::map<std::string, double> par{{"n", double(n)}, {"p", p}};
      rows.push_back({"success_prob", n, p, 0,
                      make_report("success_prob", par, D::Upper, ae_success_prob_bound(n, p),
                                  s.success_probability)});
      rows.push_back({"success_prob_asymptotic", n, p, 0,
                      make_report("success_prob_asymptotic", par, D::Upper,
                                  ae_success_prob_bound_asymptotic(n, p), s.success_probability)});
      rows.push_back({"output_infidelity", n, p, 0,
                      make_report("output_infidelity", par, D::Upper,
                                  ae_infidelity_bound(s.input_infidelity()),
                                  s.output_infidelity())});
    }
    for (double eps : cfg.eps_grid) {
      const std::map<std::string, double> par{{"n", double(n)}, {"eps", eps}};
      rows.push_back({"global_noise", n, eps, 0,
                      make_report("global_noise", par, D::Lower,
                                  global_noise_model(n, eps).output_bound,
                                  global_noise_filtered_fidelity(n, eps))});
    }
  }
  return rows;
}

ExperimentOutput bounds_output(const BoundsConfig& cfg, const std::vector<BoundsRow>& rows) {
  const std::string hash = config_hash(cfg.to_json());
  ExperimentOutput out{"bounds", "", summary_base("bounds", cfg.to_json(), hash)};
  out.csv = join({"config_hash", "seed", "name", "n", "p", "w", "direction", "bound", "exact",
                  "satisfied", "slack"});
  std::size_t violated = 0;
  std::map<std::string, std::size_t> violated_by_name;
  for (const auto& r : rows) {
    const auto& b = r.report;
    out.csv += join({hash, std::to_string(cfg.seed), r.name, std::to_string(r.n),
                     format_double(r.p), std::to_string(r.w),
                     b.direction == BoundReport::Direction::Upper ? "upper" : "lower",
                     format_double(b.bound), b.exact ? format_double(*b.exact) : "",
                     b.satisfied ? "1" : "0", format_double(b.slack)});
    if (!b.satisfied) {
      ++violated;
      ++violated_by_name[r.name];
    }
  }
  out.summary["rows"] = rows.size();
  out.summary["violated"] = violated;
  out.summary["violated_by_name"] = violated_by_name;
  return out;
}

// ---------------------------------------------------------------------------
// Table 1

const std::vector<std::array<std::string, 4>>& table1_reference() {
  static const std::vector<std::array<std::string, 4>> ref{
      {"F_Z", "X", "A", "ZZ"}, {"F_Z", "Z", "A", "XX"}, {"F_Z", "X", "C", "ZI"},
      {"F_Z", "Z", "C", "XX"}, {"F_Z", "X", "D", "IX"}, {"F_Z", "Z", "D", "ZZ"},
      {"F_X", "X", "A", "ZX"}, {"F_X", "Z", "A", "XZ"}, {"F_X", "X", "C", "ZI"},
      {"F_X", "Z", "C", "XZ"}, {"F_X", "X", "D", "ZX"}, {"F_X", "Z", "D", "IZ"},
  };
  return ref;
}

std::vector<Table1Row> run_table1() {
  const NoisyCircuit fz = build_fault_location_circuit(FilterAxis::Z);
  const NoisyCircuit fx = build_fault_location_circuit(FilterAxis::X);
  auto letter = [](const PauliString& p, std::size_t q) {
    static const char kL[4] = {'I', 'X', 'Z', 'Y'};
    return kL[static_cast<uint8_t>(p.get(q))];
  };
  std::vector<Table1Row> rows;
  for (const auto& [filter, fault, loc, expected] : table1_reference()) {
    const NoisyCircuit& c = filter == "F_Z" ? fz : fx;
    std::size_t site = c.elements().size();
    uint32_t qubit = 0;
    for (std::size_t i = 0; i < c.elements().size(); ++i) {
      if (const auto* f = std::get_if<FaultSite>(&c.elements()[i]); f && f->label == loc) {
        site = i;
        qubit = f->qubits.at(0);
      }
    }
    if (site == c.elements().size()) throw std::logic_error("table1: missing fault site " + loc);
    const Pauli1 kind = fault == "X" ? Pauli1::X : Pauli1::Z;
    const FaultPropagation fp = propagate_fault(c, site, PauliString::single(2, qubit, kind));
    Table1Row row{filter, fault, loc, expected, "", false, false};
    row.computed = {letter(fp.residual, 1), letter(fp.residual, 0)};
    row.match = row.computed == expected;
    auto has_x = [](char ch) { return ch == 'X' || ch == 'Y'; };
    row.operational_match =
        row.computed[1] == expected[1] && has_x(row.computed[0]) == has_x(expected[0]);
    rows.push_back(row);
  }
  return rows;
}

ExperimentOutput table1_output(const std::vector<Table1Row>& rows, uint64_t seed) {
  const json cfg = {{"seed", seed}};
  const std::string hash = config_hash(cfg);
  ExperimentOutput out{"table1", "", summary_base("table1", cfg, hash)};
  out.csv = join({"config_hash", "seed", "filter", "fault", "location", "expected", "computed",
                  "match", "operational_match"});
  std::size_t matches = 0, op_matches = 0;
  for (const auto& r : rows) {
    out.csv += join({hash, std::to_string(seed), r.filter, r.fault, r.location, r.expected,
                     r.computed, r.match ? "1" : "0", r.operational_match ? "1" : "0"});
    matches += r.match;
    op_matches += r.operational_match;
  }
  out.summary["rows"] = rows.size();
  out.summary["matches"] = matches;
  out.summary["operational_matches"] = op_matches;
  return out;
}

// ---------------------------------------------------------------------------
// T gate and CCZ

TgateConfig TgateConfig::from_json(const json& j) {
  check_keys(j, {"p_grid", "biased", "seed"}, "tgate");
  TgateConfig c;
  read_opt(j, "p_grid", c.p_grid);
  read_opt(j, "biased", c.biased);
  read_opt(j, "seed", c.seed);
  return c;
}

json TgateConfig::to_json() const { return {{"p_grid", p_grid}, {"biased", biased}, {"seed", seed}}; }

std::vector<TgateRow> run_tgate(const TgateConfig& cfg) {
  std::vector<std::array<double, 3>> points;
  for (double p : cfg.p_grid) points.push_back({p / 3, p / 3, p / 3});
  for (const auto& b : cfg.biased) points.push_back(b);
  std::vector<TgateRow> rows;
  for (const auto& [px, py, pz] : points) {
    if (px < 0 || py < 0 || pz < 0 || px + py + pz > 1) {
      throw std::invalid_argument("tgate: invalid Pauli probabilities");
    }
    for (bool yfb : {false, true}) {
      TgateRow row{px, py, pz, yfb, {}, {}, 0.0, 0.0};
      row.expected = yfb ? t_gate_purified_y_feedback(px, py, pz) : t_gate_purified(px, py, pz);
      const Pauli1Probs noise{1 - px - py - pz, px, py, pz};
      const Superoperator s = dense_oracle_run(build_t_filter_circuit(noise, yfb)).channel();
      row.dense = pauli_channel_of(s);
      row.distance = channel_distance(s, superop(row.expected));
      row.fidelity_gain = fidelity(row.expected) - noise[0];
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentOutput tgate_output(const TgateConfig& cfg, const std::vector<TgateRow>& rows) {
  const std::string hash = config_hash(cfg.to_json());
  ExperimentOutput out{"tgate", "", summary_base("tgate", cfg.to_json(), hash)};
  out.csv = join({"config_hash", "seed", "px", "py", "pz", "feedback", "expected_I",
                  "expected_Z", "dense_I", "dense_Z", "distance", "fidelity_gain"});
  const PauliString pi = PauliString::from_text("I"), pz = PauliString::from_text("Z");
  double worst = 0.0;
  for (const auto& r : rows) {
    out.csv += join({hash, std::to_string(cfg.seed), format_double(r.px), format_double(r.py),
                     format_double(r.pz), r.y_feedback ? "Y" : "X",
                     format_double(r.expected.prob(pi)), format_double(r.expected.prob(pz)),
                     format_double(r.dense.prob(pi)), format_double(r.dense.prob(pz)),
                     format_double(r.distance), format_double(r.fidelity_gain)});
    worst = std::max(worst, r.distance);
  }
  out.summary["max_distance"] = worst;
  return out;
}

CczConfig CczConfig::from_json(const json& j) {
  check_keys(j, {"p_grid", "seed"}, "ccz");
  CczConfig c;
  read_opt(j, "p_grid", c.p_grid);
  read_opt(j, "seed", c.seed);
  return c;
}

json CczConfig::to_json() const { return {{"p_grid", p_grid}, {"seed", seed}}; }

std::vector<CczRow> run_ccz(const CczConfig& cfg) {
  require_rates(cfg.p_grid, "ccz p_grid");
  std::vector<CczRow> rows;
  for (double p : cfg.p_grid) {
    const Pauli1Probs noise{1 - p, p / 3, p / 3, p / 3};
    const Superoperator s = dense_oracle_run(build_ccz_filter_circuit(noise)).channel();
    rows.push_back({p, ccz_purified_fidelity(p), fidelity(pauli_channel_of(s)),
                    std::pow(1 - p, 3)});
  }
  return rows;
}

ExperimentOutput ccz_output(const CczConfig& cfg, const std::vector<CczRow>& rows) {
  const std::string hash = config_hash(cfg.to_json());
  ExperimentOutput out{"ccz", "", summary_base("ccz", cfg.to_json(), hash)};
  out.csv = join({"config_hash", "seed", "p", "formula", "dense", "input_fidelity", "abs_error"});
  for (const auto& r : rows) {
    out.csv += join({hash, std::to_string(cfg.seed), format_double(r.p), format_double(r.formula),
                     format_double(r.dense), format_double(r.input_fidelity),
                     format_double(std::abs(r.dense - r.formula))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

ExperimentOutput run_experiment(const std::string& id, const json& config,
                                std::optional<uint64_t> shots, std::optional<uint64_t> seed) {
  const json cfg = config.is_null() ? json::object() : config;
  if (id == "fig5") {
    Fig5Config c = Fig5Config::from_json(cfg);
    if (shots) c.shots = *shots;
    if (seed) c.seed = *seed;
    return fig5_output(run_fig5(c));
  }
  if (id.rfind("fig6", 0) == 0) {
    Fig6Config c = Fig6Config::from_json(cfg);
    if (shots) c.shots = *shots;
    if (seed) c.seed = *seed;
    if (id != "fig6") {
      const std::map<std::string, Fig6Variant> panels{
          {"fig6a", Fig6Variant::SameNoise}, {"fig6b", Fig6Variant::SameNoise},
          {"fig6c", Fig6Variant::SameNoise}, {"fig6d", Fig6Variant::SameNoise},
          {"fig6e", Fig6Variant::CleanFilterPartial}, {"fig6f", Fig6Variant::NoiselessFilter}};
      const auto it = panels.find(id);
      if (it == panels.end()) throw std::invalid_argument("unknown experiment '" + id + "'");
      c.variants = {it->second};
    }
    ExperimentOutput out = fig6_output(run_fig6(c));
    out.name = id;
    out.summary["experiment"] = id;
    return out;
  }
  if (shots) throw std::invalid_argument(id + ": --shots applies only to sampled experiments");
  if (id == "bounds") {
    BoundsConfig c = BoundsConfig::from_json(cfg);
    if (seed) c.seed = *seed;
    return bounds_output(c, run_bounds(c));
  }
  if (id == "table1") {
    check_keys(cfg, {"seed"}, "table1");
    uint64_t s = cfg.value("seed", uint64_t{0});
    if (seed) s = *seed;
    return table1_output(run_table1(), s);
  }
  if (id == "tgate") {
    TgateConfig c = TgateConfig::from_json(cfg);
    if (seed) c.seed = *seed;
    return tgate_output(c, run_tgate(c));
  }
  if (id == "ccz") {
    CczConfig c = CczConfig::from_json(cfg);
    if (seed) c.seed = *seed;
    return ccz_output(c, run_ccz(c));
  }
  throw std::invalid_argument("unknown experiment '" + id + "'");
}

void write_output(const std::string& dir, const ExperimentOutput& out) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / out.name;
  {
    std::ofstream f(base.string() + ".csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + base.string() + ".csv");
    f << out.csv;
  }
  std::ofstream f(base.string() + ".json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + base.string() + ".json");
  f << out.summary.dump(2) << '\n';
}

json run_simulation(const json& config) {
  check_keys(config, {"circuit", "noise", "filter", "shots", "seed"}, "run");
  const json& cj = config.at("circuit");
  const std::string kind = cj.at("kind").get<std::string>();
  const std::size_t n = cj.at("n").get<std::size_t>();
  CliffordCircuit circ(n);
  if (kind == "brickwork") {
    circ = brickwork_circuit(n, cj.at("depth").get<std::size_t>());
  } else if (kind == "text") {
    circ = CliffordCircuit::from_text(n, cj.at("gates").get<std::string>());
  } else {
    throw std::invalid_argument("run: circuit kind must be 'brickwork' or 'text'");
  }

  AeFilterNoise noise;
  if (config.contains("noise")) {
    const json& nj = config.at("noise");
    check_keys(nj, {"pc_filter", "pt_filter", "pc_circuit", "pt_circuit", "idle_ancilla"}, "noise");
    read_opt(nj, "pc_filter", noise.pc_filter);
    read_opt(nj, "pt_filter", noise.pt_filter);
    read_opt(nj, "pc_circuit", noise.pc_circuit);
    read_opt(nj, "pt_circuit", noise.pt_circuit);
    read_opt(nj, "idle_ancilla", noise.idle_ancilla);
  }
  const std::string filter = config.value("filter", std::string("ae"));
  const uint64_t shots = config.value("shots", uint64_t{100'000});
  const uint64_t seed = config.value("seed", uint64_t{1});
  require_shots(shots, 1);

  if (filter != "ae" && filter != "none") {
    throw std::invalid_argument("run: filter must be 'ae' or 'none'");
  }
  const NoisyCircuit nc = filter == "ae"
                              ? build_ae_filter_circuit(circ, noise)
                              : build_noisy_circuit(circ, noise.pc_circuit, noise.pt_circuit);
  json out = sim_json(monte_carlo(nc, shots, seed));
  out["config_hash"] = config_hash(config);
  out["filter"] = filter;
  return out;
}

}  // namespace qfilter
