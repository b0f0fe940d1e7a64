#include "adasel/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "kmeans.hpp"

namespace adasel {

double PlatformSpec::achievable_fps(const std::string& combo_id) const {
  const auto it = combo_capabilities.find(combo_id);
  return it == combo_capabilities.end() ? 0.0 : it->second;
}

const ScenarioProfile* DesignProfile::find_scenario(const std::string& id) const {
  const auto it = std::find_if(scenarios.begin(), scenarios.end(),
                               [&](const ScenarioProfile& s) { return s.scenario_id == id; });
  return it == scenarios.end() ? nullptr : &*it;
}

const PlatformSpec* DesignProfile::find_platform(const std::string& id) const {
  const auto it = std::find_if(platforms.begin(), platforms.end(),
                               [&](const PlatformSpec& p) { return p.id == id; });
  return it == platforms.end() ? nullptr : &*it;
}

const AlgoParamCombo* DesignProfile::find_combo(const std::string& id) const {
  const auto it = std::find_if(combos.begin(), combos.end(),
                               [&](const AlgoParamCombo& c) { return c.id == id; });
  return it == combos.end() ? nullptr : &*it;
}

PerformanceIndex::PerformanceIndex(const std::vector<PerformanceRecord>& records) {
  for (const auto& record : records) {
    if (!(record.error >= 0.0)) {
      fail(ErrorCode::NegativeError, "error for (" + record.scenario_id + ", " + record.combo_id +
                                         ", " + record.platform_id + ") is negative or NaN");
    }
    const auto [it, inserted] =
        index_.emplace(std::make_tuple(record.scenario_id, record.combo_id, record.platform_id),
                       &record);
    if (!inserted) {
      fail(ErrorCode::DuplicateKey, "duplicate record (" + record.scenario_id + ", " +
                                        record.combo_id + ", " + record.platform_id + ")");
    }
  }
}

const PerformanceRecord* PerformanceIndex::find(const std::string& scenario,
                                                const std::string& combo,
                                                const std::string& platform) const {
  const auto it = index_.find(std::make_tuple(scenario, combo, platform));
  return it == index_.end() ? nullptr : it->second;
}

double PerformanceIndex::error(const std::string& scenario, const std::string& combo,
                               const std::string& platform) const {
  const PerformanceRecord* record = find(scenario, combo, platform);
  if (record == nullptr) {
    fail(ErrorCode::MissingRecord, "no performance record for (scenario=" + scenario +
                                       ", combo=" + combo + ", platform=" + platform + ")");
  }
  return record->error;
}

void validate_catalog(const std::vector<AlgoParamCombo>& combos,
                      const std::vector<PlatformSpec>& platforms) {
  std::set<std::string> combo_ids;
  for (const auto& combo : combos) {
    if (combo.id.empty()) fail(ErrorCode::ConfigInvalid, "combo with empty id");
    if (!combo_ids.insert(combo.id).second) {
      fail(ErrorCode::DuplicateKey, "combo id '" + combo.id + "' is not unique");
    }
    if (!(combo.fps > 0.0)) fail(ErrorCode::ConfigInvalid, "combo '" + combo.id + "' has fps <= 0");
    if (combo.resolution.width <= 0 || combo.resolution.height <= 0) {
      fail(ErrorCode::ConfigInvalid, "combo '" + combo.id + "' has a non-positive resolution");
    }
  }
  std::set<std::string> platform_ids;
  for (const auto& platform : platforms) {
    if (platform.id.empty()) fail(ErrorCode::ConfigInvalid, "platform with empty id");
    if (!platform_ids.insert(platform.id).second) {
      fail(ErrorCode::DuplicateKey, "platform id '" + platform.id + "' is not unique");
    }
    if (!(platform.cost >= 0.0)) {
      fail(ErrorCode::ConfigInvalid, "platform '" + platform.id + "' has negative cost");
    }
    for (const auto& [combo_id, fps] : platform.combo_capabilities) {
      if (!combo_ids.contains(combo_id)) {
        fail(ErrorCode::ConfigInvalid,
             "platform '" + platform.id + "' references unknown combo '" + combo_id + "'");
      }
      if (!(fps > 0.0)) {
        fail(ErrorCode::ConfigInvalid,
             "platform '" + platform.id + "' lists fps <= 0 for '" + combo_id + "'");
      }
    }
  }
}

Clustering cluster_scenarios(const Eigen::Ref<const Matrix>& frames, const ClusterOptions& options) {
  const auto n = frames.rows();
  const int m = options.scenario_count;
  if (m < 1) fail(ErrorCode::InvalidM, "scenario count must be >= 1, got " + std::to_string(m));
  if (m > n) {
    fail(ErrorCode::InvalidM, "scenario count " + std::to_string(m) + " exceeds the " +
                                  std::to_string(n) + " available frames");
  }
  require_finite(frames, "training frames");

  const std::vector<int> order = detail::content_order(frames);
  Matrix sorted(n, frames.cols());
  for (Eigen::Index p = 0; p < n; ++p) sorted.row(p) = frames.row(order[p]);
  const detail::KMeansResult km =
      detail::kmeans(sorted, m, options.seed, options.max_iterations, options.restarts);

  std::vector<int> raw(n);
  for (Eigen::Index p = 0; p < n; ++p) raw[order[p]] = km.labels[p];

  // Number clusters by first appearance in the caller's row order.
  std::vector<int> renumber(m, -1);
  int next = 0;
  Clustering result;
  result.assignment.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (renumber[raw[i]] < 0) renumber[raw[i]] = next++;
    result.assignment[i] = renumber[raw[i]];
  }

  std::vector<std::vector<Eigen::Index>> members(m);
  for (Eigen::Index i = 0; i < n; ++i) members[result.assignment[i]].push_back(i);

  for (int k = 0; k < m; ++k) {
    const auto count = static_cast<int>(members[k].size());
    if (count < options.subspace_dim + 1) {
      fail(ErrorCode::TooFewSamples,
           "scenario " + std::to_string(k) + " has " + std::to_string(count) +
               " member frames; PCA with b=" + std::to_string(options.subspace_dim) +
               " needs at least " + std::to_string(options.subspace_dim + 1));
    }
    Matrix cluster(count, frames.cols());
    for (int j = 0; j < count; ++j) cluster.row(j) = frames.row(members[k][j]);

    ScenarioProfile scenario;
    scenario.scenario_id = "scenario-" + std::to_string(k);
    scenario.member_count = count;
    scenario.representative_feature = cluster.colwise().mean().transpose();
    try {
      scenario.subspace = pca_basis(cluster, options.subspace_dim);
    } catch (const RankDeficientError& e) {
      throw RankDeficientError(e.achievable_rank(), options.subspace_dim);
    }
    result.scenarios.push_back(std::move(scenario));
  }
  return result;
}

void name_scenarios_by_majority(Clustering& clustering, const std::vector<std::string>& labels) {
  if (labels.size() != clustering.assignment.size()) {
    fail(ErrorCode::DimensionMismatch, "got " + std::to_string(labels.size()) +
                                           " labels for " +
                                           std::to_string(clustering.assignment.size()) + " frames");
  }
  std::vector<std::map<std::string, int>> votes(clustering.scenarios.size());
  for (std::size_t i = 0; i < labels.size(); ++i) ++votes[clustering.assignment[i]][labels[i]];

  std::map<std::string, std::size_t> taken;
  for (std::size_t k = 0; k < votes.size(); ++k) {
    // std::map iteration is lexicographic, so ties go to the smallest label.
    const auto winner = std::max_element(
        votes[k].begin(), votes[k].end(),
        [](const auto& lhs, const auto& rhs) { return lhs.second < rhs.second; });
    if (const auto clash = taken.find(winner->first); clash != taken.end()) {
      fail(ErrorCode::AmbiguousLabels, "clusters " + std::to_string(clash->second) + " and " +
                                           std::to_string(k) + " both have majority label '" +
                                           winner->first + "'");
    }
    taken.emplace(winner->first, k);
    clustering.scenarios[k].scenario_id = winner->first;
  }
}

std::vector<std::string> feasible_combos(const PlatformSpec& platform,
                                         const std::vector<AlgoParamCombo>& combos,
                                         double required_fps) {
  std::vector<std::string> out;
  for (const auto& combo : combos) {
    const double fps = platform.achievable_fps(combo.id);
    if (fps > 0.0 && fps >= required_fps) out.push_back(combo.id);
  }
  return out;
}

PlatformSelection select_platform(const std::vector<PlatformSpec>& platforms,
                                  const std::vector<AlgoParamCombo>& combos,
                                  const std::vector<std::string>& scenario_ids,
                                  const std::vector<PerformanceRecord>& performance,
                                  const PlatformConstraints& constraints) {
  if (scenario_ids.empty()) fail(ErrorCode::EmptyProfile, "no scenarios to evaluate platforms on");
  const PerformanceIndex index(performance);

  PlatformSelection selection;
  std::optional<std::size_t> best;
  for (std::size_t p = 0; p < platforms.size(); ++p) {
    const PlatformSpec& platform = platforms[p];
    PlatformDiagnostic diag;
    diag.platform_id = platform.id;
    diag.cost = platform.cost;
    diag.within_budget = platform.cost <= constraints.max_cost;
    diag.best_mean_error = std::numeric_limits<double>::infinity();

    const auto feasible = feasible_combos(platform, combos, constraints.required_fps);
    if (!feasible.empty()) {
      double total = 0.0;
      for (const auto& scenario : scenario_ids) {
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto& combo : feasible) {
          lowest = std::min(lowest, index.error(scenario, combo, platform.id));
        }
        total += lowest;
      }
      diag.best_mean_error = total / static_cast<double>(scenario_ids.size());
    }
    selection.diagnostics.push_back(diag);

    if (!diag.within_budget || !(diag.best_mean_error <= constraints.max_mean_error)) continue;
    if (!best) {
      best = p;
      continue;
    }
    const PlatformDiagnostic& incumbent = selection.diagnostics[*best];
    if (diag.cost < incumbent.cost ||
        (diag.cost == incumbent.cost && diag.best_mean_error < incumbent.best_mean_error)) {
      best = p;
    }
  }

  if (!best) {
    std::ostringstream msg;
    msg << "no platform meets max_mean_error=" << constraints.max_mean_error
        << ", required_fps=" << constraints.required_fps << ", max_cost=" << constraints.max_cost;
    throw NoFeasiblePlatformError(msg.str(), std::move(selection.diagnostics));
  }
  selection.platform_id = platforms[*best].id;
  return selection;
}

DesignProfile label_scenarios(DesignProfile profile) {
  const PerformanceIndex index(profile.performance);
  const double required_fps = profile.config.constraints.required_fps;
  for (auto& scenario : profile.scenarios) {
    scenario.labels.clear();
    for (const auto& platform : profile.platforms) {
      const auto feasible = feasible_combos(platform, profile.combos, required_fps);
      std::optional<std::string> chosen;
      double chosen_error = 0.0;
      double chosen_fps = 0.0;
      for (const auto& combo : feasible) {
        const double err = index.error(scenario.scenario_id, combo, platform.id);
        const double fps = platform.achievable_fps(combo);
        const bool better = !chosen || err < chosen_error ||
                            (err == chosen_error &&
                             (fps > chosen_fps || (fps == chosen_fps && combo < *chosen)));
        if (better) {
          chosen = combo;
          chosen_error = err;
          chosen_fps = fps;
        }
      }
      if (chosen) scenario.labels[platform.id] = *chosen;
    }
  }
  return profile;
}

DesignProfile build_design_profile(const Eigen::Ref<const Matrix>& frames,
                                   const std::vector<std::string>& frame_labels,
                                   std::vector<AlgoParamCombo> combos,
                                   std::vector<PlatformSpec> platforms,
                                   std::vector<PerformanceRecord> performance,
                                   const ProfileConfig& config) {
  validate_catalog(combos, platforms);
  if (frames.cols() < 2) fail(ErrorCode::InvalidArgument, "feature dimension must be at least 2");

  ClusterOptions options;
  options.scenario_count = config.scenario_count;
  options.subspace_dim = config.subspace_dim;
  options.seed = config.seed;
  Clustering clustering = cluster_scenarios(frames, options);
  if (!frame_labels.empty()) name_scenarios_by_majority(clustering, frame_labels);

  DesignProfile profile;
  profile.config = config;
  profile.config.ambient_dim = static_cast<int>(frames.cols());
  profile.scenarios = std::move(clustering.scenarios);
  profile.combos = std::move(combos);
  profile.platforms = std::move(platforms);
  profile.performance = std::move(performance);

  std::vector<std::string> ids;
  for (const auto& s : profile.scenarios) ids.push_back(s.scenario_id);
  profile.selected_platform = select_platform(profile.platforms, profile.combos, ids,
                                              profile.performance, config.constraints)
                                  .platform_id;
  return label_scenarios(std::move(profile));
}

}  // namespace adasel
