#include "adasel/runtime.hpp"

#include <chrono>
#include <limits>

#include "adasel/digest.hpp"
#include "adasel/gfk.hpp"
#include "adasel/parallel.hpp"

namespace adasel {

std::vector<TimeWindow> segment_windows(const Eigen::Ref<const Matrix>& stream, int length) {
  if (stream.rows() == 0) fail(ErrorCode::EmptyStream, "feature stream has no frames");
  if (length < 2) {
    fail(ErrorCode::InvalidArgument, "window length must be >= 2, got " + std::to_string(length));
  }
  const Eigen::Index n = stream.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
  for (Eigen::Index start = 0; start < n; start += length) {
    spans.emplace_back(start, std::min<Eigen::Index>(length, n - start));
  }
  // Remainder policy: keep a short tail of >= length/2 frames, else merge it.
  if (spans.size() > 1 && 2 * spans.back().second < length) {
    const Eigen::Index tail = spans.back().second;
    spans.pop_back();
    spans.back().second += tail;
  }

  std::vector<TimeWindow> windows;
  windows.reserve(spans.size());
  for (std::size_t j = 0; j < spans.size(); ++j) {
    TimeWindow w;
    w.window_id = static_cast<int>(j);
    w.first_frame = spans[j].first;
    w.frames = stream.middleRows(spans[j].first, spans[j].second);
    windows.push_back(std::move(w));
  }
  return windows;
}

TimeWindow build_window(TimeWindow window, int b) {
  if (b < 1) fail(ErrorCode::InvalidArgument, "subspace dimension must be >= 1");
  if (window.frame_count() < b + 1) {
    fail(ErrorCode::TooFewFrames, "window " + std::to_string(window.window_id) + " has " +
                                      std::to_string(window.frame_count()) +
                                      " frames; b=" + std::to_string(b) + " needs at least " +
                                      std::to_string(b + 1));
  }
  require_finite(window.frames, "window frames");
  window.requested_dim = b;
  window.aggregated_feature = window.frames.colwise().mean().transpose();
  window.subspace.reset();
  window.degraded = false;
  try {
    window.subspace = pca_basis(window.frames, b);
  } catch (const RankDeficientError& e) {
    window.degraded = true;
    if (e.achievable_rank() >= 1) window.subspace = pca_basis(window.frames, e.achievable_rank());
  }
  return window;
}

TimeWindow build_window(const Eigen::Ref<const Matrix>& frames, int b) {
  TimeWindow w;
  w.frames = frames;
  return build_window(std::move(w), b);
}

ScenarioMatch match_scenario(const TimeWindow& window, const DesignProfile& profile) {
  if (profile.scenarios.empty()) fail(ErrorCode::EmptyProfile, "profile has no scenarios");
  if (window.aggregated_feature.size() == 0) {
    fail(ErrorCode::InvalidArgument, "window has not been built");
  }
  const int a = profile.config.ambient_dim;
  if (window.aggregated_feature.size() != a) {
    fail(ErrorCode::DimensionMismatch, "window features have dimension " +
                                           std::to_string(window.aggregated_feature.size()) +
                                           ", profile expects " + std::to_string(a));
  }
  if (!window.subspace) {
    fail(ErrorCode::DegenerateWindow, "window " + std::to_string(window.window_id) +
                                          " has zero variance; no subspace to compare");
  }
  const SubspaceBasis& z = *window.subspace;
  const int dim = z.dim();

  const std::size_t m = profile.scenarios.size();
  ScenarioMatch match;
  match.distances.assign(m, 0.0);
  match.similarities.assign(m, 0.0);
  parallel_for(m, [&](std::size_t i) {
    const ScenarioProfile& scenario = profile.scenarios[i];
    if (scenario.subspace.ambient_dim() != a) {
      fail(ErrorCode::DimensionMismatch, "scenario '" + scenario.scenario_id +
                                             "' has ambient dimension " +
                                             std::to_string(scenario.subspace.ambient_dim()));
    }
    if (scenario.subspace.dim() < dim) {
      fail(ErrorCode::DimensionMismatch, "scenario '" + scenario.scenario_id + "' has b=" +
                                             std::to_string(scenario.subspace.dim()) +
                                             " but the window has b=" + std::to_string(dim));
    }
    const SubspaceBasis x =
        scenario.subspace.dim() == dim ? scenario.subspace : scenario.subspace.leading(dim);
    const PrincipalDecomposition dec = principal_angles(x, z);
    const GeodesicKernel kernel = gfk_kernel(dec, x);
    const double d = kernel_distance(scenario.representative_feature, window.aggregated_feature,
                                     kernel);
    match.distances[i] = d;
    match.similarities[i] = similarity(d);
  });

  // Ranked on distance: exp(-d) underflows to a tie for large d.
  for (std::size_t i = 1; i < m; ++i) {
    const std::size_t best = match.scenario_index;
    const bool closer = match.distances[i] < match.distances[best];
    const bool tie_lower_id = match.distances[i] == match.distances[best] &&
                              profile.scenarios[i].scenario_id < profile.scenarios[best].scenario_id;
    if (closer || tie_lower_id) match.scenario_index = i;
  }
  match.similarity = match.similarities[match.scenario_index];
  match.scenario_id = profile.scenarios[match.scenario_index].scenario_id;
  return match;
}

std::string select_combo(const std::string& scenario_id, const std::string& platform_id,
                         const DesignProfile& profile) {
  const ScenarioProfile* scenario = profile.find_scenario(scenario_id);
  if (scenario == nullptr) {
    fail(ErrorCode::UnlabeledScenario, "unknown scenario '" + scenario_id + "'");
  }
  const auto it = scenario->labels.find(platform_id);
  if (it == scenario->labels.end()) {
    fail(ErrorCode::UnlabeledScenario,
         "scenario '" + scenario_id + "' has no label for platform '" + platform_id + "'");
  }
  return it->second;
}

SelectionTrace run_selection(const Eigen::Ref<const Matrix>& stream, const DesignProfile& profile,
                             const std::string& platform_id, int window_length,
                             const SelectionOptions& options) {
  if (profile.scenarios.empty()) fail(ErrorCode::EmptyProfile, "profile has no scenarios");
  for (const auto& s : profile.scenarios) {
    if (!s.labels.contains(platform_id)) {
      fail(ErrorCode::UnlabeledScenario,
           "scenario '" + s.scenario_id + "' has no label for platform '" + platform_id + "'");
    }
  }
  if (stream.cols() != profile.config.ambient_dim) {
    fail(ErrorCode::DimensionMismatch, "stream has dimension " + std::to_string(stream.cols()) +
                                           ", profile expects " +
                                           std::to_string(profile.config.ambient_dim));
  }

  SelectionTrace trace;
  trace.profile_digest = profile_digest(profile);
  trace.platform_id = platform_id;
  trace.window_length = window_length;

  for (TimeWindow& raw : segment_windows(stream, window_length)) {
    const int id = raw.window_id;
    try {
      const auto start = std::chrono::steady_clock::now();
      const TimeWindow window = build_window(std::move(raw), profile.config.subspace_dim);
      const ScenarioMatch match = match_scenario(window, profile);
      SelectionDecision decision;
      decision.window_id = window.window_id;
      decision.first_frame = window.first_frame;
      decision.frame_count = window.frame_count();
      decision.matched_scenario_id = match.scenario_id;
      decision.similarity = match.similarity;
      decision.all_similarities = match.similarities;
      decision.chosen_combo_id = select_combo(match.scenario_id, platform_id, profile);
      decision.platform_id = platform_id;
      decision.degraded = window.degraded;
      if (options.record_timing) {
        decision.elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
      }
      trace.decisions.push_back(std::move(decision));
    } catch (const Error& e) {
      throw e.with_context("window " + std::to_string(id));
    }
  }
  return trace;
}

int switch_count(const SelectionTrace& trace) {
  int switches = 0;
  for (std::size_t j = 1; j < trace.decisions.size(); ++j) {
    if (trace.decisions[j].chosen_combo_id != trace.decisions[j - 1].chosen_combo_id) ++switches;
  }
  return switches;
}

}  // namespace adasel
