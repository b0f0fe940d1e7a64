#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "adasel/profile.hpp"
#include "fixtures.hpp"

namespace adasel {
namespace {

using testing::gaussian;
using testing::random_orthonormal;

ErrorCode code_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an adasel::Error";
  return ErrorCode::IoError;
}

// Three well-separated blobs of 20 frames in R^6, rows interleaved.
Matrix three_blobs(std::mt19937_64& rng, std::vector<std::string>* labels = nullptr) {
  Matrix frames(60, 6);
  for (int i = 0; i < 60; ++i) {
    const int blob = i % 3;
    Vector centre = Vector::Zero(6);
    centre(blob) = 25.0;
    frames.row(i) = centre.transpose() + gaussian(rng, 1, 6);
    if (labels) labels->push_back("blob" + std::to_string(blob));
  }
  return frames;
}

std::vector<AlgoParamCombo> two_combos() {
  return {{"fast", "A", 30.0, {320, 240}}, {"slow", "B", 10.0, {640, 480}}};
}

PlatformSpec platform(const std::string& id, double cost, double fast_fps, double slow_fps) {
  PlatformSpec p;
  p.id = id;
  p.cost = cost;
  p.combo_capabilities = {{"fast", fast_fps}, {"slow", slow_fps}};
  return p;
}

TEST(ClusterScenarios, RecoversSeparatedBlobs) {
  std::mt19937_64 rng(21);
  std::vector<std::string> labels;
  const Matrix frames = three_blobs(rng, &labels);
  ClusterOptions opts;
  opts.scenario_count = 3;
  opts.subspace_dim = 2;
  const Clustering c = cluster_scenarios(frames, opts);
  ASSERT_EQ(c.scenarios.size(), 3u);
  // Numbered by first appearance: rows 0, 1, 2 are blobs 0, 1, 2.
  for (int i = 0; i < 60; ++i) EXPECT_EQ(c.assignment[i], i % 3);
  for (const auto& s : c.scenarios) {
    EXPECT_EQ(s.member_count, 20);
    EXPECT_EQ(s.subspace.dim(), 2);
  }
  EXPECT_EQ(c.scenarios[1].scenario_id, "scenario-1");
}

TEST(ClusterScenarios, DeterministicAndRowOrderInvariant) {
  std::mt19937_64 rng(22);
  const Matrix frames = three_blobs(rng);
  ClusterOptions opts;
  opts.scenario_count = 4;  // forces an arbitrary split inside one blob
  opts.subspace_dim = 2;
  const Clustering a = cluster_scenarios(frames, opts);
  const Clustering b = cluster_scenarios(frames, opts);
  EXPECT_EQ(a.assignment, b.assignment);

  std::vector<int> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix shuffled(60, 6);
  for (int i = 0; i < 60; ++i) shuffled.row(i) = frames.row(perm[i]);
  const Clustering c = cluster_scenarios(shuffled, opts);
  // Same partition: rows together in one run are together in the other.
  for (int i = 0; i < 60; ++i) {
    for (int j = i + 1; j < 60; ++j) {
      EXPECT_EQ(a.assignment[perm[i]] == a.assignment[perm[j]], c.assignment[i] == c.assignment[j]);
    }
  }
}

TEST(ClusterScenarios, InputValidation) {
  std::mt19937_64 rng(23);
  const Matrix frames = three_blobs(rng);
  ClusterOptions opts;
  opts.subspace_dim = 2;
  opts.scenario_count = 61;
  EXPECT_EQ(code_of([&] { cluster_scenarios(frames, opts); }), ErrorCode::InvalidM);
  opts.scenario_count = 0;
  EXPECT_EQ(code_of([&] { cluster_scenarios(frames, opts); }), ErrorCode::InvalidM);
  opts.scenario_count = 3;
  opts.subspace_dim = 20;
  EXPECT_EQ(code_of([&] { cluster_scenarios(frames, opts); }), ErrorCode::TooFewSamples);
}

TEST(NameScenarios, UsesMajorityLabelAndDetectsClashes) {
  std::mt19937_64 rng(24);
  std::vector<std::string> labels;
  const Matrix frames = three_blobs(rng, &labels);
  ClusterOptions opts;
  opts.scenario_count = 3;
  opts.subspace_dim = 2;
  Clustering c = cluster_scenarios(frames, opts);
  labels[0] = "blob1";  // one outlier vote does not change the majority
  name_scenarios_by_majority(c, labels);
  EXPECT_EQ(c.scenarios[0].scenario_id, "blob0");
  EXPECT_EQ(c.scenarios[2].scenario_id, "blob2");

  Clustering d = cluster_scenarios(frames, opts);
  std::vector<std::string> same(60, "only");
  EXPECT_EQ(code_of([&] { name_scenarios_by_majority(d, same); }), ErrorCode::AmbiguousLabels);
  EXPECT_EQ(code_of([&] { name_scenarios_by_majority(d, {"x"}); }), ErrorCode::DimensionMismatch);
}

TEST(PerformanceIndex, RejectsDuplicatesAndNegativeErrors) {
  std::vector<PerformanceRecord> recs = {{"s", "c", "p", 1.0, {}}, {"s", "c", "p", 2.0, {}}};
  EXPECT_EQ(code_of([&] { PerformanceIndex{recs}; }), ErrorCode::DuplicateKey);
  recs = {{"s", "c", "p", -1.0, {}}};
  EXPECT_EQ(code_of([&] { PerformanceIndex{recs}; }), ErrorCode::NegativeError);
  recs = {{"s", "c", "p", 1.5, {}}};
  const PerformanceIndex index(recs);
  EXPECT_EQ(index.error("s", "c", "p"), 1.5);
  EXPECT_EQ(index.find("s", "c", "q"), nullptr);
  EXPECT_EQ(code_of([&] { index.error("s", "x", "p"); }), ErrorCode::MissingRecord);
}

TEST(ValidateCatalog, ChecksInvariants) {
  EXPECT_NO_THROW(validate_catalog(two_combos(), {platform("p", 1, 30, 10)}));
  auto combos = two_combos();
  combos[1].id = "fast";
  EXPECT_EQ(code_of([&] { validate_catalog(combos, {}); }), ErrorCode::DuplicateKey);
  auto p = platform("p", 1, 30, 10);
  p.combo_capabilities["ghost"] = 5;
  EXPECT_ANY_THROW(validate_catalog(two_combos(), {p}));
  EXPECT_ANY_THROW(validate_catalog(two_combos(), {platform("p", -1, 30, 10)}));
}

TEST(FeasibleCombos, FiltersByAchievableFps) {
  const auto combos = two_combos();
  EXPECT_EQ(feasible_combos(platform("p", 1, 30, 10), combos, 15),
            std::vector<std::string>{"fast"});
  EXPECT_EQ(feasible_combos(platform("p", 1, 30, 10), combos, 0),
            (std::vector<std::string>{"fast", "slow"}));
  EXPECT_TRUE(feasible_combos(platform("p", 1, 5, 2), combos, 10).empty());
}

std::vector<PerformanceRecord> two_platform_table() {
  // cheap: best errors 4 and 6 (mean 5); pricey: best errors 1 and 2 (mean 1.5).
  return {{"s0", "fast", "cheap", 4, {}},  {"s0", "slow", "cheap", 9, {}},
          {"s1", "fast", "cheap", 7, {}},  {"s1", "slow", "cheap", 6, {}},
          {"s0", "fast", "pricey", 3, {}}, {"s0", "slow", "pricey", 1, {}},
          {"s1", "fast", "pricey", 2, {}}, {"s1", "slow", "pricey", 2, {}}};
}

TEST(SelectPlatform, CheapestFeasibleWins) {
  const std::vector<PlatformSpec> ps = {platform("cheap", 1, 30, 10), platform("pricey", 5, 60, 30)};
  const auto perf = two_platform_table();
  const auto loose = select_platform(ps, two_combos(), {"s0", "s1"}, perf, {10.0, 0.0, 100.0});
  EXPECT_EQ(loose.platform_id, "cheap");
  EXPECT_DOUBLE_EQ(loose.diagnostics[0].best_mean_error, 5.0);
  EXPECT_DOUBLE_EQ(loose.diagnostics[1].best_mean_error, 1.5);
  const auto strict = select_platform(ps, two_combos(), {"s0", "s1"}, perf, {2.0, 0.0, 100.0});
  EXPECT_EQ(strict.platform_id, "pricey");
}

TEST(SelectPlatform, InfeasibleReportsDiagnostics) {
  const std::vector<PlatformSpec> ps = {platform("cheap", 1, 30, 10), platform("pricey", 5, 60, 30)};
  try {
    select_platform(ps, two_combos(), {"s0", "s1"}, two_platform_table(), {2.0, 0.0, 3.0});
    FAIL();
  } catch (const NoFeasiblePlatformError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasiblePlatform);
    ASSERT_EQ(e.diagnostics().size(), 2u);
    EXPECT_TRUE(e.diagnostics()[0].within_budget);
    EXPECT_FALSE(e.diagnostics()[1].within_budget);
  }
}

TEST(SelectPlatform, CostTieGoesToLowerErrorThenInputOrder) {
  const std::vector<PlatformSpec> ps = {platform("cheap", 1, 30, 10), platform("pricey", 1, 60, 30)};
  auto sel = select_platform(ps, two_combos(), {"s0", "s1"}, two_platform_table(), {10, 0, 10});
  EXPECT_EQ(sel.platform_id, "pricey");
  std::vector<PerformanceRecord> flat;
  for (const char* p : {"a", "b"}) {
    flat.push_back({"s0", "fast", p, 1.0, {}});
    flat.push_back({"s0", "slow", p, 1.0, {}});
  }
  sel = select_platform({platform("a", 1, 30, 10), platform("b", 1, 30, 10)}, two_combos(), {"s0"},
                        flat, {10, 0, 10});
  EXPECT_EQ(sel.platform_id, "a");
}

TEST(SelectPlatform, MissingRecordIsAnError) {
  auto perf = two_platform_table();
  perf.pop_back();
  EXPECT_EQ(code_of([&] {
              select_platform({platform("cheap", 1, 30, 10), platform("pricey", 5, 60, 30)},
                              two_combos(), {"s0", "s1"}, perf, {10, 0, 100});
            }),
            ErrorCode::MissingRecord);
}

DesignProfile labelled_profile(std::vector<PerformanceRecord> perf, double required_fps = 0.0) {
  DesignProfile profile;
  profile.combos = two_combos();
  profile.platforms = {platform("cheap", 1, 30, 10), platform("pricey", 5, 60, 30)};
  profile.performance = std::move(perf);
  profile.config.constraints.required_fps = required_fps;
  for (const char* id : {"s0", "s1"}) {
    ScenarioProfile s;
    s.scenario_id = id;
    profile.scenarios.push_back(s);
  }
  return profile;
}

TEST(LabelScenarios, PicksMinimumErrorPerPlatform) {
  const DesignProfile p = label_scenarios(labelled_profile(two_platform_table()));
  EXPECT_EQ(p.scenarios[0].labels.at("cheap"), "fast");
  EXPECT_EQ(p.scenarios[1].labels.at("cheap"), "slow");
  EXPECT_EQ(p.scenarios[0].labels.at("pricey"), "slow");
  // s1 on pricey ties at 2.0: the higher achievable fps (fast, 60) wins.
  EXPECT_EQ(p.scenarios[1].labels.at("pricey"), "fast");
}

TEST(LabelScenarios, IdempotentAndRespectsFpsFloor) {
  const DesignProfile once = label_scenarios(labelled_profile(two_platform_table(), 20.0));
  const DesignProfile twice = label_scenarios(once);
  for (std::size_t i = 0; i < once.scenarios.size(); ++i) {
    EXPECT_EQ(once.scenarios[i].labels, twice.scenarios[i].labels);
  }
  // At 20 fps only "fast" runs on cheap; pricey runs both.
  EXPECT_EQ(once.scenarios[1].labels.at("cheap"), "fast");
  EXPECT_EQ(once.scenarios[0].labels.at("pricey"), "slow");
}

TEST(LabelScenarios, LexicographicTieBreakOnEqualFps) {
  std::vector<PerformanceRecord> perf;
  for (const char* s : {"s0", "s1"}) {
    for (const char* p : {"cheap", "pricey"}) {
      perf.push_back({s, "fast", p, 3.0, {}});
      perf.push_back({s, "slow", p, 3.0, {}});
    }
  }
  DesignProfile profile = labelled_profile(perf);
  profile.platforms[0].combo_capabilities = {{"fast", 10}, {"slow", 10}};
  profile = label_scenarios(profile);
  EXPECT_EQ(profile.scenarios[0].labels.at("cheap"), "fast");
}

TEST(BuildDesignProfile, EndToEndOnBlobs) {
  std::mt19937_64 rng(25);
  std::vector<std::string> labels;
  const Matrix frames = three_blobs(rng, &labels);
  std::vector<PerformanceRecord> perf;
  for (int b = 0; b < 3; ++b) {
    const std::string s = "blob" + std::to_string(b);
    perf.push_back({s, "fast", "p", b == 0 ? 1.0 : 5.0, {}});
    perf.push_back({s, "slow", "p", b == 0 ? 5.0 : 1.0, {}});
  }
  ProfileConfig cfg;
  cfg.scenario_count = 3;
  cfg.subspace_dim = 2;
  cfg.constraints = {10.0, 0.0, 10.0};
  const DesignProfile p =
      build_design_profile(frames, labels, two_combos(), {platform("p", 1, 30, 10)}, perf, cfg);
  EXPECT_EQ(p.config.ambient_dim, 6);
  EXPECT_EQ(p.selected_platform, "p");
  EXPECT_EQ(p.find_scenario("blob0")->labels.at("p"), "fast");
  EXPECT_EQ(p.find_scenario("blob2")->labels.at("p"), "slow");
  EXPECT_NE(p.find_combo("slow"), nullptr);
  EXPECT_EQ(p.find_platform("q"), nullptr);
}

}  // namespace
}  // namespace adasel
