#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adasel/profile.hpp"

namespace adasel {

/// A contiguous block of test frames that receives one selection decision.
struct TimeWindow {
  int window_id = 0;
  Eigen::Index first_frame = 0;
  Matrix frames;                       // rows are frames
  FeatureVector aggregated_feature;    // mean frame; empty until built
  std::optional<SubspaceBasis> subspace;
  int requested_dim = 0;
  bool degraded = false;               // PCA fell back to fewer than requested_dim

  Eigen::Index frame_count() const noexcept { return frames.rows(); }
  int achieved_dim() const noexcept { return subspace ? subspace->dim() : 0; }
};

/// Splits the stream rows into consecutive windows of `length` frames. A
/// trailing remainder of at least length/2 frames becomes a short final
/// window; a smaller one is merged into the previous window. Throws
/// EmptyStream and InvalidArgument (length < 2).
std::vector<TimeWindow> segment_windows(const Eigen::Ref<const Matrix>& stream, int length);

/// Fills in the aggregated feature and PCA subspace. If the frames do not
/// span b dimensions the largest achievable b' is used and `degraded` is set
/// (b' = 0 leaves no subspace). Throws TooFewFrames below b + 1 frames.
TimeWindow build_window(TimeWindow window, int b);
TimeWindow build_window(const Eigen::Ref<const Matrix>& frames, int b);

struct ScenarioMatch {
  std::size_t scenario_index = 0;
  std::string scenario_id;
  std::vector<double> distances;
  std::vector<double> similarities;
  double similarity = 0.0;
};

/// Kernel distance and similarity of the window against every scenario;
/// the smallest distance wins, ties to the lowest scenario id.
/// A degraded window is compared on each scenario's leading b' directions.
ScenarioMatch match_scenario(const TimeWindow& window, const DesignProfile& profile);

/// Table lookup of the design-time label. Throws UnlabeledScenario.
std::string select_combo(const std::string& scenario_id, const std::string& platform_id,
                         const DesignProfile& profile);

struct SelectionDecision {
  int window_id = 0;
  Eigen::Index first_frame = 0;
  Eigen::Index frame_count = 0;
  std::string matched_scenario_id;
  double similarity = 0.0;
  std::vector<double> all_similarities;
  std::string chosen_combo_id;
  std::string platform_id;
  bool degraded = false;
  std::optional<double> elapsed_ms;

  bool operator==(const SelectionDecision&) const = default;
};

struct SelectionTrace {
  std::string profile_digest;
  std::string platform_id;
  int window_length = 0;
  std::vector<SelectionDecision> decisions;

  bool operator==(const SelectionTrace&) const = default;
};

struct SelectionOptions {
  bool record_timing = true;
};

/// segment_windows → build_window → match_scenario → select_combo for every
/// window, in stream order. Errors are rethrown with the window id attached.
SelectionTrace run_selection(const Eigen::Ref<const Matrix>& stream, const DesignProfile& profile,
                             const std::string& platform_id, int window_length,
                             const SelectionOptions& options = {});

/// Number of adjacent decisions whose chosen combo differs.
int switch_count(const SelectionTrace& trace);

}  // namespace adasel
