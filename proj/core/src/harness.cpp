#include "adasel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace adasel {
namespace {

using nlohmann::json;
using Engine = boost::random::mt19937_64;

constexpr int kMaxSubspaceDraws = 1000;

[[noreturn]] void invalid(const std::string& why) { fail(ErrorCode::ConfigInvalid, why); }

Matrix gaussian(Engine& rng, Eigen::Index rows, Eigen::Index cols) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill row by row so the draw order does not depend on storage order.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

Matrix random_basis(Engine& rng, int a, int b) {
  const Matrix g = gaussian(rng, a, b);
  Matrix q = g.householderQr().householderQ() * Matrix::Identity(a, b);
  canonicalize_column_signs(q);
  return q;
}

std::vector<Matrix> separated_subspaces(Engine& rng, const SyntheticConfig& c) {
  std::vector<Matrix> bases;
  int draws = 0;
  while (static_cast<int>(bases.size()) < c.M) {
    if (++draws > kMaxSubspaceDraws * c.M) {
      invalid("could not draw " + std::to_string(c.M) + " subspaces of dimension " +
              std::to_string(c.b) + " in R^" + std::to_string(c.a) + " separated by " +
              std::to_string(c.min_separation) + " rad");
    }
    Matrix candidate = random_basis(rng, c.a, c.b);
    const bool separated = std::all_of(bases.begin(), bases.end(), [&](const Matrix& other) {
      return subspace_angles(candidate, other).minCoeff() >= c.min_separation;
    });
    if (separated) bases.push_back(std::move(candidate));
  }
  return bases;
}

Matrix draw_error_means(Engine& rng, int m, int h) {
  Matrix means(m, h);
  for (int i = 0; i < m; ++i) {
    std::vector<int> rank(static_cast<std::size_t>(h));
    std::iota(rank.begin(), rank.end(), 0);
    // Fisher-Yates with a portable distribution.
    for (int k = h - 1; k > 0; --k) {
      boost::random::uniform_int_distribution<int> pick(0, k);
      std::swap(rank[static_cast<std::size_t>(k)], rank[static_cast<std::size_t>(pick(rng))]);
    }
    for (int c = 0; c < h; ++c) means(i, c) = 4.0 + 3.0 * rank[static_cast<std::size_t>(c)];
  }
  return means;
}

// Frames of scenario i: x·(centre + g) + sigma·n.
Matrix scenario_frames(Engine& rng, const Matrix& basis, const Vector& centre, int count,
                       double sigma) {
  const Matrix coeffs = gaussian(rng, count, basis.cols()).rowwise() + centre.transpose();
  Matrix frames = coeffs * basis.transpose();
  if (sigma > 0.0) frames += sigma * gaussian(rng, count, basis.rows());
  return frames;
}

template <typename T>
T config_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

void validate(const SyntheticConfig& c) {
  if (c.a < 2) invalid("a must be >= 2");
  if (c.b < 1 || c.b >= c.a) invalid("b must satisfy 1 <= b < a");
  if (c.M < 1) invalid("M must be >= 1");
  if (c.combos < 1) invalid("combos must be >= 1");
  if (c.frames_per_scenario <= c.b) {
    invalid("frames_per_scenario (" + std::to_string(c.frames_per_scenario) +
            ") must exceed b (" + std::to_string(c.b) + ")");
  }
  if (c.windows < 1) invalid("windows must be >= 1");
  if (c.window_length <= c.b || c.window_length < 2) {
    invalid("window_length must be >= max(2, b + 1)");
  }
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) invalid("noise_sigma must be >= 0");
  if (!(c.stay_probability >= 0.0 && c.stay_probability <= 1.0)) {
    invalid("stay_probability must lie in [0, 1]");
  }
  if (!(c.mean_scale >= 0.0) || !std::isfinite(c.mean_scale)) invalid("mean_scale must be >= 0");
  if (!(c.error_noise >= 0.0) || !std::isfinite(c.error_noise)) invalid("error_noise must be >= 0");
  if (!(c.min_separation >= 0.0 && c.min_separation <= std::numbers::pi / 2)) {
    invalid("min_separation must lie in [0, pi/2]");
  }
  if (c.error_means) {
    if (c.error_means->rows() != c.M || c.error_means->cols() != c.combos) {
      invalid("error_means must be M x combos");
    }
    if (!c.error_means->allFinite() || (c.error_means->array() < 0.0).any()) {
      invalid("error_means must be finite and >= 0");
    }
  }
}

SyntheticConfig synthetic_config_from_json(const json& doc) {
  if (!doc.is_object()) invalid("synthetic config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "a",          "b",           "M",           "combos",           "frames_per_scenario",
      "noise_sigma", "windows",    "window_length", "stay_probability", "mean_scale",
      "error_noise", "error_means", "seed",        "min_separation"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.contains(key)) invalid("unknown field '" + key + "'");
  }
  SyntheticConfig c;
  c.a = config_field(doc, "a", c.a);
  c.b = config_field(doc, "b", c.b);
  c.M = config_field(doc, "M", c.M);
  c.combos = config_field(doc, "combos", c.combos);
  c.frames_per_scenario = config_field(doc, "frames_per_scenario", c.frames_per_scenario);
  c.noise_sigma = config_field(doc, "noise_sigma", c.noise_sigma);
  c.windows = config_field(doc, "windows", c.windows);
  c.window_length = config_field(doc, "window_length", c.window_length);
  c.stay_probability = config_field(doc, "stay_probability", c.stay_probability);
  c.mean_scale = config_field(doc, "mean_scale", c.mean_scale);
  c.error_noise = config_field(doc, "error_noise", c.error_noise);
  c.seed = config_field(doc, "seed", c.seed);
  c.min_separation = config_field(doc, "min_separation", c.min_separation);
  if (doc.contains("error_means")) {
    const auto rows = config_field(doc, "error_means", std::vector<std::vector<double>>{});
    Matrix means(static_cast<Eigen::Index>(rows.size()),
                 rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != means.cols()) {
        invalid("error_means rows have different lengths");
      }
      for (std::size_t h = 0; h < rows[i].size(); ++h) {
        means(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = rows[i][h];
      }
    }
    c.error_means = std::move(means);
  }
  validate(c);
  return c;
}

json synthetic_config_to_json(const SyntheticConfig& c) {
  json doc = {{"a", c.a},
              {"b", c.b},
              {"M", c.M},
              {"combos", c.combos},
              {"frames_per_scenario", c.frames_per_scenario},
              {"noise_sigma", c.noise_sigma},
              {"windows", c.windows},
              {"window_length", c.window_length},
              {"stay_probability", c.stay_probability},
              {"mean_scale", c.mean_scale},
              {"error_noise", c.error_noise},
              {"seed", c.seed},
              {"min_separation", c.min_separation}};
  if (c.error_means) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < c.error_means->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index h = 0; h < c.error_means->cols(); ++h) row.push_back((*c.error_means)(i, h));
      rows.push_back(std::move(row));
    }
    doc["error_means"] = std::move(rows);
  }
  return doc;
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  validate(config);
  const SyntheticConfig& c = config;
  Engine rng(c.seed);
  SyntheticDataset data;
  data.config = c;
  data.subspaces = separated_subspaces(rng, c);
  data.error_means = c.error_means ? *c.error_means : draw_error_means(rng, c.M, c.combos);

  std::vector<Vector> centres;
  for (int i = 0; i < c.M; ++i) centres.push_back(c.mean_scale * gaussian(rng, c.b, 1).col(0));

  data.training_frames.resize(static_cast<Eigen::Index>(c.M) * c.frames_per_scenario, c.a);
  for (int i = 0; i < c.M; ++i) {
    data.training_frames.middleRows(static_cast<Eigen::Index>(i) * c.frames_per_scenario,
                                    c.frames_per_scenario) =
        scenario_frames(rng, data.subspaces[i], centres[i], c.frames_per_scenario, c.noise_sigma);
    data.training_labels.insert(data.training_labels.end(),
                                static_cast<std::size_t>(c.frames_per_scenario),
                                SyntheticDataset::scenario_id(i));
  }

  // Markov chain over scenarios: stay with stay_probability, else jump to a
  // uniformly chosen different scenario.
  boost::random::uniform_01<double> unit;
  boost::random::uniform_int_distribution<int> first(0, c.M - 1);
  std::vector<int> chain(static_cast<std::size_t>(c.windows));
  chain[0] = first(rng);
  for (int j = 1; j < c.windows; ++j) {
    int state = chain[static_cast<std::size_t>(j - 1)];
    if (c.M > 1 && unit(rng) >= c.stay_probability) {
      boost::random::uniform_int_distribution<int> other(0, c.M - 2);
      const int k = other(rng);
      state = k >= state ? k + 1 : k;
    }
    chain[static_cast<std::size_t>(j)] = state;
  }

  data.test_frames.resize(static_cast<Eigen::Index>(c.windows) * c.window_length, c.a);
  for (int j = 0; j < c.windows; ++j) {
    const int s = chain[static_cast<std::size_t>(j)];
    data.test_frames.middleRows(static_cast<Eigen::Index>(j) * c.window_length, c.window_length) =
        scenario_frames(rng, data.subspaces[s], centres[s], c.window_length, c.noise_sigma);
    data.test_labels.insert(data.test_labels.end(), static_cast<std::size_t>(c.window_length),
                            SyntheticDataset::scenario_id(s));
  }

  boost::random::uniform_real_distribution<double> jitter(-c.error_noise, c.error_noise);
  GroundTruth& truth = data.truth;
  for (int h = 0; h < c.combos; ++h) truth.combo_ids.push_back(SyntheticDataset::combo_id(h));
  truth.errors.resize(c.windows, c.combos);
  for (int j = 0; j < c.windows; ++j) {
    const int s = chain[static_cast<std::size_t>(j)];
    truth.window_ids.push_back(j);
    truth.scenario_ids.push_back(SyntheticDataset::scenario_id(s));
    for (int h = 0; h < c.combos; ++h) {
      const double noise = c.error_noise > 0.0 ? jitter(rng) : 0.0;
      truth.errors(j, h) = std::max(0.0, data.error_means(s, h) + noise);
    }
  }

  for (int i = 0; i < c.M; ++i) {
    for (int h = 0; h < c.combos; ++h) {
      data.performance.push_back({SyntheticDataset::scenario_id(i), SyntheticDataset::combo_id(h),
                                  SyntheticDataset::kPlatformId, data.error_means(i, h), {}});
    }
  }

  PlatformSpec platform;
  platform.id = SyntheticDataset::kPlatformId;
  platform.cost = 1.0;
  for (int h = 0; h < c.combos; ++h) {
    data.catalog.combos.push_back({SyntheticDataset::combo_id(h), "synthetic", 30.0, {320, 240}});
    platform.combo_capabilities[SyntheticDataset::combo_id(h)] = 30.0;
  }
  data.catalog.platforms.push_back(std::move(platform));
  return data;
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
  const json meta = {{"generator", "synthetic"}, {"config", synthetic_config_to_json(data.config)}};
  write_feature_stream(dir / "train.json", data.training_frames, data.training_labels,
                       "synthetic training frames", meta);
  write_feature_stream(dir / "test.json", data.test_frames, data.test_labels,
                       "synthetic test stream", meta);
  std::ostringstream truth;
  write_ground_truth(truth, data.truth);
  write_text_file(dir / "truth.csv", truth.str());
  std::ostringstream perf;
  write_performance_table(perf, data.performance);
  write_text_file(dir / "perf.csv", perf.str());
  write_catalog(dir / "platforms.json", data.catalog);
}

RegretReport evaluate_regret(const SelectionTrace& trace, const GroundTruth& truth) {
  const std::size_t n = trace.decisions.size();
  if (n != truth.window_ids.size()) {
    fail(ErrorCode::Misaligned, "trace has " + std::to_string(n) + " windows, ground truth has " +
                                    std::to_string(truth.window_ids.size()));
  }
  if (truth.combo_ids.empty() && n > 0) fail(ErrorCode::Misaligned, "ground truth has no combos");
  for (std::size_t j = 0; j < n; ++j) {
    if (trace.decisions[j].window_id != truth.window_ids[j]) {
      fail(ErrorCode::Misaligned, "position " + std::to_string(j) + ": trace window " +
                                      std::to_string(trace.decisions[j].window_id) +
                                      " vs ground-truth window " +
                                      std::to_string(truth.window_ids[j]));
    }
  }

  RegretReport report;
  report.combo_ids = truth.combo_ids;
  report.static_sums.assign(truth.combo_ids.size(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t h = 0; h < truth.combo_ids.size(); ++h) {
      report.static_sums[h] += truth.errors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(h));
    }
  }
  std::size_t best = 0;
  for (std::size_t h = 1; h < report.static_sums.size(); ++h) {
    if (report.static_sums[h] < report.static_sums[best]) best = h;
  }
  if (!report.combo_ids.empty()) {
    report.best_static_combo = report.combo_ids[best];
    report.best_static_sum = report.static_sums[best];
  }

  bool scenarios_known = n > 0;
  int matched = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const SelectionDecision& d = trace.decisions[j];
    const auto row = static_cast<Eigen::Index>(j);
    const auto col = std::find(truth.combo_ids.begin(), truth.combo_ids.end(), d.chosen_combo_id);
    if (col == truth.combo_ids.end()) {
      fail(ErrorCode::MissingRecord, "window " + std::to_string(d.window_id) + " chose '" +
                                         d.chosen_combo_id + "', which has no ground-truth errors");
    }
    WindowRegret w;
    w.window_id = d.window_id;
    w.selected_combo = d.chosen_combo_id;
    w.selected_error = truth.errors(row, col - truth.combo_ids.begin());
    Eigen::Index oracle = 0;
    truth.errors.row(row).minCoeff(&oracle);
    w.oracle_combo = truth.combo_ids[static_cast<std::size_t>(oracle)];
    w.oracle_error = truth.errors(row, oracle);
    w.best_static_error = truth.errors(row, static_cast<Eigen::Index>(best));
    w.matched_scenario = d.matched_scenario_id;
    w.true_scenario = truth.scenario_ids[j];
    if (w.true_scenario.empty()) scenarios_known = false;
    if (w.true_scenario == w.matched_scenario) ++matched;
    report.selected_sum += w.selected_error;
    report.oracle_sum += w.oracle_error;
    report.per_window.push_back(std::move(w));
  }
  report.switch_count = switch_count(trace);
  if (scenarios_known) report.scenario_match_accuracy = static_cast<double>(matched) / static_cast<double>(n);
  return report;
}

std::string emit_report(const RegretReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::string out =
        "window_id,selected_combo,selected_error,oracle_combo,oracle_error,best_static_error,"
        "regret\n";
    for (const auto& w : report.per_window) {
      out += std::to_string(w.window_id) + ',' + w.selected_combo + ',' +
             format_double(w.selected_error) + ',' + w.oracle_combo + ',' +
             format_double(w.oracle_error) + ',' + format_double(w.best_static_error) + ',' +
             format_double(w.selected_error - w.oracle_error) + '\n';
    }
    return out;
  }

  json windows = json::array();
  for (const auto& w : report.per_window) {
    windows.push_back({{"window_id", w.window_id},
                       {"selected_combo", w.selected_combo},
                       {"selected_error", w.selected_error},
                       {"oracle_combo", w.oracle_combo},
                       {"oracle_error", w.oracle_error},
                       {"best_static_error", w.best_static_error},
                       {"matched_scenario", w.matched_scenario},
                       {"true_scenario", w.true_scenario}});
  }
  json statics = json::array();
  for (std::size_t h = 0; h < report.combo_ids.size(); ++h) {
    statics.push_back({{"combo", report.combo_ids[h]}, {"sum", report.static_sums[h]}});
  }
  const json doc = {
      {"format_version", kFormatVersion},
      {"per_window", windows},
      {"selected_sum", report.selected_sum},
      {"oracle_sum", report.oracle_sum},
      {"regret", report.regret()},
      {"static_sums", statics},
      {"best_static_combo", report.best_static_combo},
      {"best_static_sum", report.best_static_sum},
      {"switch_count", report.switch_count},
      {"scenario_match_accuracy",
       report.scenario_match_accuracy ? json(*report.scenario_match_accuracy) : json(nullptr)}};
  return doc.dump(2) + "\n";
}

RegretReport parse_report_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  check_format_version(doc, "regret report");
  RegretReport r;
  try {
    for (const auto& w : doc.at("per_window")) {
      r.per_window.push_back({w.at("window_id").get<int>(), w.at("selected_combo").get<std::string>(),
                              w.at("selected_error").get<double>(),
                              w.at("oracle_combo").get<std::string>(),
                              w.at("oracle_error").get<double>(),
                              w.at("best_static_error").get<double>(),
                              w.at("matched_scenario").get<std::string>(),
                              w.at("true_scenario").get<std::string>()});
    }
    r.selected_sum = doc.at("selected_sum").get<double>();
    r.oracle_sum = doc.at("oracle_sum").get<double>();
    for (const auto& s : doc.at("static_sums")) {
      r.combo_ids.push_back(s.at("combo").get<std::string>());
      r.static_sums.push_back(s.at("sum").get<double>());
    }
    r.best_static_combo = doc.at("best_static_combo").get<std::string>();
    r.best_static_sum = doc.at("best_static_sum").get<double>();
    r.switch_count = doc.at("switch_count").get<int>();
    if (!doc.at("scenario_match_accuracy").is_null()) {
      r.scenario_match_accuracy = doc.at("scenario_match_accuracy").get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
  return r;
}

}  // namespace adasel
