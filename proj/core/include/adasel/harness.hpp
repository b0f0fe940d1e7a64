#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adasel/dataio.hpp"
#include "adasel/profile.hpp"
#include "adasel/runtime.hpp"

namespace adasel {

struct SyntheticConfig {
  int a = 64;
  int b = 5;
  int M = 5;
  int combos = 4;
  int frames_per_scenario = 40;
  double noise_sigma = 0.1;
  int windows = 200;
  int window_length = 30;
  double stay_probability = 0.8;  // Markov chain self-transition
  double mean_scale = 3.0;        // spread of scenario means inside their subspaces
  double error_noise = 1.0;       // half-width of the uniform per-window error noise
  std::optional<Matrix> error_means;  // M × combos; drawn from the seed when absent
  std::uint64_t seed = 42;
  double min_separation = 0.2;    // smallest principal angle between any two scenarios

  bool operator==(const SyntheticConfig&) const = default;
};

/// Throws ConfigInvalid with the offending field.
void validate(const SyntheticConfig& config);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& doc);
nlohmann::json synthetic_config_to_json(const SyntheticConfig& config);

struct SyntheticDataset {
  SyntheticConfig config;
  std::vector<Matrix> subspaces;      // generating bases, a × b each
  Matrix error_means;                 // M × combos
  Matrix training_frames;             // M·frames_per_scenario rows
  std::vector<std::string> training_labels;
  Matrix test_frames;                 // windows·window_length rows
  std::vector<std::string> test_labels;  // per frame
  GroundTruth truth;                  // per window, per combo
  std::vector<PerformanceRecord> performance;
  Catalog catalog;

  static std::string scenario_id(int i) { return "s" + std::to_string(i); }
  static std::string combo_id(int h) { return "c" + std::to_string(h); }
  static constexpr const char* kPlatformId = "platform-1";
};

/// Deterministic given config.seed. Scenarios are random b-dimensional
/// subspaces resampled until every pair is min_separation apart; frames are
/// mean + in-subspace Gaussian + isotropic noise; test windows follow a
/// seeded Markov chain over scenarios.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

/// Writes train.json/.bin, test.json/.bin, truth.csv, perf.csv and
/// platforms.json into `dir` (created if needed).
void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

struct WindowRegret {
  int window_id = 0;
  std::string selected_combo;
  double selected_error = 0.0;
  std::string oracle_combo;
  double oracle_error = 0.0;
  double best_static_error = 0.0;
  std::string matched_scenario;
  std::string true_scenario;  // empty when unknown
  bool operator==(const WindowRegret&) const = default;
};

struct RegretReport {
  std::vector<WindowRegret> per_window;
  double selected_sum = 0.0;
  double oracle_sum = 0.0;
  std::vector<std::string> combo_ids;
  std::vector<double> static_sums;  // aligned with combo_ids
  std::string best_static_combo;
  double best_static_sum = 0.0;
  int switch_count = 0;
  std::optional<double> scenario_match_accuracy;

  double regret() const noexcept { return selected_sum - oracle_sum; }
  bool operator==(const RegretReport&) const = default;
};

/// Scores a trace against per-window errors. The oracle takes the per-window
/// minimum; the best static combo minimizes the column sum (ties to the
/// earlier column). Throws Misaligned when windows do not line up and
/// MissingRecord when a chosen combo has no ground-truth column.
RegretReport evaluate_regret(const SelectionTrace& trace, const GroundTruth& truth);

enum class ReportFormat { Csv, Json };

/// CSV header: window_id,selected_combo,selected_error,oracle_combo,
/// oracle_error,best_static_error,regret.
std::string emit_report(const RegretReport& report, ReportFormat format);
RegretReport parse_report_json(const std::string& text);

}  // namespace adasel
