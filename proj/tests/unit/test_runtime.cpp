#include <gtest/gtest.h>

#include <cstdlib>

#include "adasel/parallel.hpp"
#include "adasel/runtime.hpp"
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

struct TwoScenarioWorld {
  std::vector<Matrix> bases;
  std::vector<Vector> centres;
  DesignProfile profile;

  Matrix frames(std::mt19937_64& rng, int scenario, int count, double sigma = 0.05) const {
    const Matrix coeffs = gaussian(rng, count, 2).rowwise() + centres[scenario].transpose();
    return coeffs * bases[scenario].transpose() + sigma * gaussian(rng, count, 8);
  }
};

TwoScenarioWorld make_world(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TwoScenarioWorld w;
  w.profile.config.ambient_dim = 8;
  w.profile.config.subspace_dim = 2;
  w.profile.combos = {{"c0", "A", 30, {320, 240}}, {"c1", "B", 30, {640, 480}}};
  PlatformSpec p;
  p.id = "p";
  p.cost = 1;
  p.combo_capabilities = {{"c0", 30}, {"c1", 30}};
  w.profile.platforms = {p};
  w.profile.selected_platform = "p";
  for (int i = 0; i < 2; ++i) {
    w.bases.push_back(random_orthonormal(rng, 8, 2));
    w.centres.push_back(3.0 * gaussian(rng, 2, 1).col(0));
    const Matrix train = w.frames(rng, i, 40);
    ScenarioProfile s;
    s.scenario_id = "s" + std::to_string(i);
    s.member_count = 40;
    s.representative_feature = train.colwise().mean().transpose();
    s.subspace = pca_basis(train, 2);
    s.labels["p"] = "c" + std::to_string(i);
    w.profile.scenarios.push_back(s);
  }
  return w;
}

TEST(SegmentWindows, ExactMultiple) {
  const auto windows = segment_windows(Matrix::Zero(90, 3), 30);
  ASSERT_EQ(windows.size(), 3u);
  EXPECT_EQ(windows[2].first_frame, 60);
  EXPECT_EQ(windows[2].frame_count(), 30);
}

TEST(SegmentWindows, RemainderPolicy) {
  // 15 >= 30/2 stays as a short window.
  auto w = segment_windows(Matrix::Zero(75, 3), 30);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.back().frame_count(), 15);
  // 14 < 15 merges into the previous window.
  w = segment_windows(Matrix::Zero(74, 3), 30);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.back().frame_count(), 44);
  // A stream shorter than one window is one window.
  w = segment_windows(Matrix::Zero(7, 3), 30);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].frame_count(), 7);
}

TEST(SegmentWindows, Errors) {
  EXPECT_EQ(code_of([] { segment_windows(Matrix::Zero(0, 3), 30); }), ErrorCode::EmptyStream);
  EXPECT_EQ(code_of([] { segment_windows(Matrix::Zero(5, 3), 1); }), ErrorCode::InvalidArgument);
}

TEST(BuildWindow, FullRankAndDegraded) {
  std::mt19937_64 rng(31);
  const TimeWindow full = build_window(gaussian(rng, 10, 6), 3);
  EXPECT_FALSE(full.degraded);
  EXPECT_EQ(full.achieved_dim(), 3);

  Matrix line = Matrix::Zero(10, 6);
  for (int i = 0; i < 10; ++i) line(i, 2) = i;
  const TimeWindow deg = build_window(line, 3);
  EXPECT_TRUE(deg.degraded);
  EXPECT_EQ(deg.achieved_dim(), 1);
  EXPECT_EQ(deg.requested_dim, 3);

  const TimeWindow flat = build_window(Matrix::Ones(10, 6), 3);
  EXPECT_TRUE(flat.degraded);
  EXPECT_FALSE(flat.subspace.has_value());

  EXPECT_EQ(code_of([&] { build_window(gaussian(rng, 3, 6), 3); }), ErrorCode::TooFewFrames);
}

TEST(MatchScenario, PicksGeneratingScenario) {
  const TwoScenarioWorld w = make_world(32);
  std::mt19937_64 rng(33);
  for (int s = 0; s < 2; ++s) {
    const ScenarioMatch m = match_scenario(build_window(w.frames(rng, s, 30), 2), w.profile);
    EXPECT_EQ(m.scenario_index, static_cast<std::size_t>(s));
    EXPECT_EQ(m.similarities.size(), 2u);
    for (double sim : m.similarities) {
      EXPECT_GT(sim, 0.0);
      EXPECT_LE(sim, 1.0);
    }
  }
}

TEST(MatchScenario, ErrorsAndDegradedWindows) {
  TwoScenarioWorld w = make_world(34);
  std::mt19937_64 rng(35);
  EXPECT_EQ(code_of([&] { match_scenario(build_window(gaussian(rng, 10, 7), 2), w.profile); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { match_scenario(build_window(Matrix::Ones(10, 8), 2), w.profile); }),
            ErrorCode::DegenerateWindow);
  EXPECT_EQ(code_of([&] { match_scenario(TimeWindow{}, w.profile); }), ErrorCode::InvalidArgument);

  // A window confined to one direction of scenario 1 still matches it.
  Matrix rank_one(20, 8);
  for (int i = 0; i < 20; ++i) {
    rank_one.row(i) = (w.profile.scenarios[1].representative_feature +
                       (i - 10) * 0.1 * w.profile.scenarios[1].subspace.basis().col(0))
                          .transpose();
  }
  const TimeWindow deg = build_window(rank_one, 2);
  ASSERT_TRUE(deg.degraded);
  EXPECT_EQ(match_scenario(deg, w.profile).scenario_id, "s1");

  DesignProfile empty = w.profile;
  empty.scenarios.clear();
  EXPECT_EQ(code_of([&] { match_scenario(build_window(gaussian(rng, 10, 8), 2), empty); }),
            ErrorCode::EmptyProfile);
}

TEST(MatchScenario, TiesGoToLowestScenarioId) {
  TwoScenarioWorld w = make_world(43);
  w.profile.scenarios[1] = w.profile.scenarios[0];
  w.profile.scenarios[0].scenario_id = "b";
  w.profile.scenarios[1].scenario_id = "a";
  std::mt19937_64 rng(44);
  const ScenarioMatch m = match_scenario(build_window(w.frames(rng, 0, 30), 2), w.profile);
  EXPECT_EQ(m.distances[0], m.distances[1]);
  EXPECT_EQ(m.scenario_id, "a");
}

TEST(SelectCombo, LooksUpLabels) {
  const TwoScenarioWorld w = make_world(36);
  EXPECT_EQ(select_combo("s1", "p", w.profile), "c1");
  EXPECT_EQ(code_of([&] { select_combo("s9", "p", w.profile); }), ErrorCode::UnlabeledScenario);
  EXPECT_EQ(code_of([&] { select_combo("s0", "q", w.profile); }), ErrorCode::UnlabeledScenario);
}

TEST(RunSelection, ConcatenatedStreamSwitchesOnce) {
  const TwoScenarioWorld w = make_world(37);
  std::mt19937_64 rng(38);
  Matrix stream(120, 8);
  stream.topRows(60) = w.frames(rng, 0, 60);
  stream.bottomRows(60) = w.frames(rng, 1, 60);
  const SelectionTrace t = run_selection(stream, w.profile, "p", 30, {false});
  ASSERT_EQ(t.decisions.size(), 4u);
  EXPECT_EQ(switch_count(t), 1);
  EXPECT_EQ(t.decisions[1].chosen_combo_id, "c0");
  EXPECT_EQ(t.decisions[2].chosen_combo_id, "c1");
  EXPECT_FALSE(t.decisions[0].elapsed_ms.has_value());
  EXPECT_EQ(t.profile_digest.size(), 64u);

  const SelectionTrace timed = run_selection(stream, w.profile, "p", 30);
  EXPECT_TRUE(timed.decisions[0].elapsed_ms.has_value());
}

TEST(RunSelection, ErrorsCarryWindowContext) {
  const TwoScenarioWorld w = make_world(39);
  std::mt19937_64 rng(40);
  Matrix stream = w.frames(rng, 0, 60);
  stream.bottomRows(30).setConstant(1.0);
  try {
    run_selection(stream, w.profile, "p", 30, {false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateWindow);
    EXPECT_NE(std::string(e.what()).find("window 1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { run_selection(stream, w.profile, "nope", 30); }),
            ErrorCode::UnlabeledScenario);
  EXPECT_EQ(code_of([&] { run_selection(gaussian(rng, 60, 5), w.profile, "p", 30); }),
            ErrorCode::DimensionMismatch);
}

TEST(RunSelection, ThreadCountDoesNotChangeDecisions) {
  const TwoScenarioWorld w = make_world(41);
  std::mt19937_64 rng(42);
  Matrix stream(90, 8);
  stream << w.frames(rng, 0, 30), w.frames(rng, 1, 30), w.frames(rng, 0, 30);
  ::setenv("ADASEL_THREADS", "1", 1);
  const SelectionTrace one = run_selection(stream, w.profile, "p", 30, {false});
  ::setenv("ADASEL_THREADS", "4", 1);
  const SelectionTrace four = run_selection(stream, w.profile, "p", 30, {false});
  ::unsetenv("ADASEL_THREADS");
  EXPECT_EQ(one, four);
}

TEST(Parallel, VisitsEveryIndexAndPropagatesErrors) {
  ::setenv("ADASEL_THREADS", "3", 1);
  EXPECT_EQ(max_threads(), 3);
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) fail(ErrorCode::InvalidArgument, "boom");
               }),
               Error);
  ::setenv("ADASEL_THREADS", "zero", 1);
  EXPECT_EQ(code_of([] { max_threads(); }), ErrorCode::ConfigInvalid);
  ::setenv("ADASEL_THREADS", "0", 1);
  EXPECT_EQ(code_of([] { max_threads(); }), ErrorCode::ConfigInvalid);
  ::unsetenv("ADASEL_THREADS");
  EXPECT_GE(max_threads(), 1);
}

}  // namespace
}  // namespace adasel
