#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfilter/analytics.hpp"
#include "qfilter/noisy_sim.hpp"

namespace qfilter {

/// CSV text plus a JSON summary for one experiment run.
struct ExperimentOutput {
  std::string name;
  std::string csv;
  nlohmann::json summary;
};

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);
/// Per-cell seed derived from the master seed and a cell key.
uint64_t derive_seed(uint64_t master, const std::string& key);
/// Shortest round-trip decimal form.
std::string format_double(double v);

// ---------------------------------------------------------------------------

struct Fig5Config {
  std::size_t n = 4;
  std::vector<double> pc_grid{0.0, 0.005, 0.01, 0.02, 0.05};
  std::vector<double> pt_grid{0.0, 0.005, 0.01, 0.02, 0.05};
  double channel_rate = 0.05;
  uint64_t shots = 1'000'000;
  uint64_t seed = 1;

  static Fig5Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct Fig5Cell {
  double pc = 0.0;
  double pt = 0.0;
  SimResult sim;
  /// F(pc, pt) - F(m, m) with m = max(pc, pt); NaN when (m, m) is off the grid.
  double delta_f = 0.0;
};

struct Fig5Result {
  Fig5Config config;
  std::string hash;
  std::vector<Fig5Cell> cells;  // pc-major grid order

  const Fig5Cell& at(double pc, double pt) const;
};

Fig5Result run_fig5(const Fig5Config& cfg);
ExperimentOutput fig5_output(const Fig5Result& r);

// ---------------------------------------------------------------------------

enum class Fig6Variant { SameNoise, CleanFilterPartial, NoiselessFilter };
std::string variant_name(Fig6Variant v);
Fig6Variant variant_from_name(const std::string& s);

struct Fig6Config {
  std::size_t n = 12;
  std::size_t depth_min = 1;
  std::size_t depth_max = 40;
  std::vector<double> p_grid{0.003, 0.01, 0.03};
  std::vector<Fig6Variant> variants{Fig6Variant::SameNoise, Fig6Variant::CleanFilterPartial,
                                    Fig6Variant::NoiselessFilter};
  /// Fixed rate of the other gate classes in the clean-filter-partial variant.
  double other_rate = 0.01;
  uint64_t shots = 100'000;
  uint64_t seed = 1;

  static Fig6Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Gate noise of one Fig6 cell; `p` is the swept rate.
AeFilterNoise fig6_noise(Fig6Variant v, double p, double other_rate);

struct Fig6Cell {
  Fig6Variant variant = Fig6Variant::SameNoise;
  double p = 0.0;
  std::size_t depth = 0;
  SimResult original;
  SimResult filtered;

  double gain() const;
  /// Combined standard error of filtered minus original fidelity.
  double sigma() const;
};

struct Fig6Result {
  Fig6Config config;
  std::string hash;
  std::vector<Fig6Cell> cells;  // variant, p, depth order

  std::vector<const Fig6Cell*> series(Fig6Variant v, double p) const;
  /// First depth with filtered - original > 2 sigma.
  std::optional<std::size_t> crossover(Fig6Variant v, double p) const;
};

Fig6Result run_fig6(const Fig6Config& cfg);
ExperimentOutput fig6_output(const Fig6Result& r);

// ---------------------------------------------------------------------------

struct BoundsConfig {
  std::size_t n_max = 8;
  std::vector<double> p_grid{0.001, 0.005, 0.01, 0.05, 0.1};
  std::vector<double> eps_grid{0.01, 0.05, 0.1, 0.2};
  uint64_t seed = 1;

  static BoundsConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct BoundsRow {
  std::string name;
  std::size_t n = 0;
  double p = 0.0;
  std::size_t w = 0;
  BoundReport report;
};

std::vector<BoundsRow> run_bounds(const BoundsConfig& cfg);
ExperimentOutput bounds_output(const BoundsConfig& cfg, const std::vector<BoundsRow>& rows);

// ---------------------------------------------------------------------------

struct Table1Row {
  std::string filter;    // "F_Z" or "F_X"
  std::string fault;     // "X" or "Z"
  std::string location;  // "A", "C" or "D"
  std::string expected;  // two letters, ancilla first
  std::string computed;
  bool match = false;
  /// Same system residual and same ancilla X-part (Z on the ancilla before
  /// its final Z-basis measurement is harmless).
  bool operational_match = false;
};

/// Reference residuals, ancilla first, for (filter, fault, location).
const std::vector<std::array<std::string, 4>>& table1_reference();
std::vector<Table1Row> run_table1();
ExperimentOutput table1_output(const std::vector<Table1Row>& rows, uint64_t seed = 0);

// ---------------------------------------------------------------------------

struct TgateConfig {
  std::vector<double> p_grid{0.01, 0.1, 0.3};
  /// Extra biased (pX, pY, pZ) points.
  std::vector<std::array<double, 3>> biased{{0.05, 0.005, 0.005}, {0.005, 0.05, 0.005}};
  uint64_t seed = 1;

  static TgateConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TgateRow {
  double px = 0.0, py = 0.0, pz = 0.0;
  bool y_feedback = false;
  PauliChannel expected;
  PauliChannel dense;
  double distance = 0.0;
  double fidelity_gain = 0.0;
};

std::vector<TgateRow> run_tgate(const TgateConfig& cfg);
ExperimentOutput tgate_output(const TgateConfig& cfg, const std::vector<TgateRow>& rows);

struct CczConfig {
  std::vector<double> p_grid{0.1, 0.3};
  uint64_t seed = 1;

  static CczConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CczRow {
  double p = 0.0;
  double formula = 0.0;
  double dense = 0.0;
  double input_fidelity = 0.0;
};

std::vector<CczRow> run_ccz(const CczConfig& cfg);
ExperimentOutput ccz_output(const CczConfig& cfg, const std::vector<CczRow>& rows);

// ---------------------------------------------------------------------------

/// Runs experiment `id` from its JSON config; `shots` and `seed` override
/// the config when given.
ExperimentOutput run_experiment(const std::string& id, const nlohmann::json& config,
                                std::optional<uint64_t> shots = std::nullopt,
                                std::optional<uint64_t> seed = std::nullopt);

/// Writes <dir>/<name>.csv and <dir>/<name>.json.
void write_output(const std::string& dir, const ExperimentOutput& out);

/// Run configuration {"circuit": {...}, "noise": {...}, "filter": "ae"|"none",
/// "shots": N, "seed": S}.
nlohmann::json run_simulation(const nlohmann::json& config);

}  // namespace qfilter
