#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "adasel/error.hpp"
#include "adasel/subspace.hpp"

namespace adasel {

struct Resolution {
  int width = 0;
  int height = 0;
  bool operator==(const Resolution&) const = default;
};

/// One selectable algorithm configuration (e.g. "ACF-240x320").
struct AlgoParamCombo {
  std::string id;
  std::string algorithm;
  double fps = 0.0;  // nominal frame rate; platforms report what they achieve
  Resolution resolution;
  bool operator==(const AlgoParamCombo&) const = default;
};

struct PlatformSpec {
  std::string id;
  std::map<std::string, double> combo_capabilities;  // combo id -> achievable fps
  double cost = 0.0;

  /// Achievable fps for a combo, or 0 when the platform cannot run it.
  double achievable_fps(const std::string& combo_id) const;
  bool operator==(const PlatformSpec&) const = default;
};

struct PerformanceRecord {
  std::string scenario_id;
  std::string combo_id;
  std::string platform_id;
  double error = 0.0;  // missed detections per window
  std::map<std::string, double> extras;  // MT, ML, IDS, FP, ... carried as-is
  bool operator==(const PerformanceRecord&) const = default;
};

struct PlatformConstraints {
  double max_mean_error = 0.0;
  double required_fps = 0.0;
  double max_cost = 0.0;
  bool operator==(const PlatformConstraints&) const = default;
};

struct ScenarioProfile {
  std::string scenario_id;
  FeatureVector representative_feature;
  SubspaceBasis subspace;
  int member_count = 0;
  std::map<std::string, std::string> labels;  // platform id -> best combo id
};

struct ProfileConfig {
  int ambient_dim = 0;
  int subspace_dim = 20;
  int scenario_count = 15;
  int window_length = 30;
  std::uint64_t seed = 42;
  PlatformConstraints constraints;
  bool operator==(const ProfileConfig&) const = default;
};

struct DesignProfile {
  ProfileConfig config;
  std::vector<ScenarioProfile> scenarios;
  std::vector<AlgoParamCombo> combos;
  std::vector<PlatformSpec> platforms;
  std::vector<PerformanceRecord> performance;
  std::string selected_platform;

  const ScenarioProfile* find_scenario(const std::string& id) const;
  const PlatformSpec* find_platform(const std::string& id) const;
  const AlgoParamCombo* find_combo(const std::string& id) const;
};

/// Keyed view of a performance table. Throws DuplicateKey on repeated
/// (scenario, combo, platform) triples and NegativeError on error < 0.
class PerformanceIndex {
 public:
  explicit PerformanceIndex(const std::vector<PerformanceRecord>& records);

  const PerformanceRecord* find(const std::string& scenario, const std::string& combo,
                                const std::string& platform) const;
  /// Like find() but throws MissingRecord naming the absent triple.
  double error(const std::string& scenario, const std::string& combo,
               const std::string& platform) const;

 private:
  std::map<std::tuple<std::string, std::string, std::string>, const PerformanceRecord*> index_;
};

/// Checks combo/platform invariants: unique ids, positive fps and sizes,
/// capabilities referencing known combos with positive fps, cost >= 0.
void validate_catalog(const std::vector<AlgoParamCombo>& combos,
                      const std::vector<PlatformSpec>& platforms);

struct ClusterOptions {
  int scenario_count = 15;
  int subspace_dim = 20;
  std::uint64_t seed = 42;
  int max_iterations = 300;
  int restarts = 10;
};

struct Clustering {
  std::vector<ScenarioProfile> scenarios;  // unlabeled; ids "scenario-<k>"
  std::vector<int> assignment;             // frame row -> scenario index
};

/// Seeded k-means++ / Lloyd clustering of the frame rows into M scenarios,
/// then per-cluster mean and PCA subspace. Frames are visited in a
/// content-sorted order, so the partition does not depend on row order.
/// Scenarios are numbered by first appearance in the input.
Clustering cluster_scenarios(const Eigen::Ref<const Matrix>& frames, const ClusterOptions& options);

/// Renames each cluster after the majority ground-truth label of its
/// members. Throws AmbiguousLabels if two clusters would share a name.
void name_scenarios_by_majority(Clustering& clustering, const std::vector<std::string>& labels);

/// Combo ids (in `combos` order) the platform runs at >= required_fps.
std::vector<std::string> feasible_combos(const PlatformSpec& platform,
                                         const std::vector<AlgoParamCombo>& combos,
                                         double required_fps);

struct PlatformSelection {
  std::string platform_id;
  std::vector<PlatformDiagnostic> diagnostics;  // one per platform, input order
};

/// Cheapest platform within max_cost whose mean (over scenarios) of the best
/// feasible combo error is <= max_mean_error; ties on cost go to the lower
/// error, then to input order. Throws NoFeasiblePlatformError.
PlatformSelection select_platform(const std::vector<PlatformSpec>& platforms,
                                  const std::vector<AlgoParamCombo>& combos,
                                  const std::vector<std::string>& scenario_ids,
                                  const std::vector<PerformanceRecord>& performance,
                                  const PlatformConstraints& constraints);

/// Labels every scenario for every platform with the minimum-error feasible
/// combo (ties: higher achievable fps, then lexicographic id). Platforms with
/// no feasible combo get no label. Idempotent.
DesignProfile label_scenarios(DesignProfile profile);

/// Full design-time pass: cluster, optionally name clusters from labels,
/// select the platform and label every scenario.
DesignProfile build_design_profile(const Eigen::Ref<const Matrix>& frames,
                                   const std::vector<std::string>& frame_labels,
                                   std::vector<AlgoParamCombo> combos,
                                   std::vector<PlatformSpec> platforms,
                                   std::vector<PerformanceRecord> performance,
                                   const ProfileConfig& config);

}  // namespace adasel
