#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "adasel/dataio.hpp"
#include "adasel/harness.hpp"
#include "adasel/parallel.hpp"
#include "adasel/profile.hpp"
#include "adasel/runtime.hpp"

namespace adasel::cli {
namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Globals {
  std::uint64_t seed = 42;
  bool seed_given = false;
  bool verbose = false;
};

struct ProfileArgs {
  std::string train, perf, platforms, out;
  int scenarios = 15;
  int subspace_dim = 20;
  int window_length = 30;
  double max_error = kUnbounded;
  double required_fps = 0.0;
  double max_cost = kUnbounded;
};

struct SelectArgs {
  std::string profile, stream, platform, out, csv;
  int window_length = 0;  // 0: take it from the profile
  bool no_timing = false;
};

struct EvalArgs {
  std::string trace, truth, out, json;
};

struct SynthArgs {
  std::string config, out_dir;
};

void print_diagnostics(std::ostream& err, const std::vector<PlatformDiagnostic>& rows) {
  err << std::left << std::setw(20) << "platform" << std::setw(12) << "cost" << std::setw(18)
      << "best_mean_error" << "within_budget\n";
  for (const auto& d : rows) {
    err << std::left << std::setw(20) << d.platform_id << std::setw(12) << format_double(d.cost)
        << std::setw(18) << (std::isinf(d.best_mean_error) ? "inf" : format_double(d.best_mean_error))
        << (d.within_budget ? "yes" : "no") << '\n';
  }
}

int cmd_profile(const ProfileArgs& args, const Globals& g, std::ostream& out, std::ostream& err) {
  ProfileConfig config;
  config.subspace_dim = args.subspace_dim;
  config.scenario_count = args.scenarios;
  config.window_length = args.window_length;
  config.seed = g.seed;
  config.constraints = {args.max_error, args.required_fps, args.max_cost};

  const FeatureStream train = read_feature_stream(args.train);
  const auto performance = read_performance_table(args.perf);
  Catalog catalog = read_catalog(args.platforms);
  if (g.verbose) {
    err << "training frames: " << train.frames.rows() << " x " << train.frames.cols() << '\n';
  }

  const DesignProfile profile =
      build_design_profile(train.frames, train.manifest.labels, std::move(catalog.combos),
                           std::move(catalog.platforms), performance, config);
  write_profile(args.out, profile);

  out << "selected platform: " << profile.selected_platform << '\n';
  for (const auto& s : profile.scenarios) {
    const auto it = s.labels.find(profile.selected_platform);
    out << s.scenario_id << " (" << s.member_count << " frames): "
        << (it == s.labels.end() ? std::string("-") : it->second) << '\n';
  }
  return kExitOk;
}

int cmd_select(const SelectArgs& args, const Globals& g, std::ostream& out, std::ostream& err) {
  const DesignProfile profile = read_profile(args.profile);
  const FeatureStream stream = read_feature_stream(args.stream);
  const std::string platform = args.platform.empty() ? profile.selected_platform : args.platform;
  const int length = args.window_length > 0 ? args.window_length : profile.config.window_length;

  SelectionOptions options;
  options.record_timing = !args.no_timing;
  const SelectionTrace trace = run_selection(stream.frames, profile, platform, length, options);
  write_trace(args.out, trace);
  std::filesystem::path csv = args.csv;
  if (csv.empty()) csv = std::filesystem::path(args.out).replace_extension(".csv");
  write_text_file(csv, trace_to_csv(trace));

  double mean_similarity = 0.0;
  for (const auto& d : trace.decisions) mean_similarity += d.similarity;
  if (!trace.decisions.empty()) mean_similarity /= static_cast<double>(trace.decisions.size());
  out << "windows: " << trace.decisions.size() << '\n'
      << "switches: " << switch_count(trace) << '\n'
      << "mean similarity: " << format_double(mean_similarity) << '\n';
  if (g.verbose) {
    for (const auto& d : trace.decisions) {
      err << "window " << d.window_id << ": " << d.matched_scenario_id << " -> "
          << d.chosen_combo_id << (d.degraded ? " (degraded)" : "");
      if (d.elapsed_ms) err << " " << format_double(*d.elapsed_ms) << " ms";
      err << '\n';
    }
  }
  return kExitOk;
}

int cmd_eval(const EvalArgs& args, const Globals&, std::ostream& out, std::ostream&) {
  const SelectionTrace trace = read_trace(args.trace);
  const GroundTruth truth = read_ground_truth(args.truth);
  const RegretReport report = evaluate_regret(trace, truth);
  const bool json_out = std::filesystem::path(args.out).extension() == ".json";
  write_text_file(args.out, emit_report(report, json_out ? ReportFormat::Json : ReportFormat::Csv));
  if (!args.json.empty()) write_text_file(args.json, emit_report(report, ReportFormat::Json));

  out << "selected total: " << format_double(report.selected_sum) << '\n'
      << "oracle total: " << format_double(report.oracle_sum) << '\n'
      << "best static: " << report.best_static_combo << " " << format_double(report.best_static_sum)
      << '\n'
      << "regret: " << format_double(report.regret()) << '\n'
      << "switches: " << report.switch_count << '\n';
  if (report.scenario_match_accuracy) {
    out << "scenario match accuracy: " << format_double(*report.scenario_match_accuracy) << '\n';
  }
  return kExitOk;
}

int cmd_synth(const SynthArgs& args, const Globals& g, std::ostream& out, std::ostream& err) {
  SyntheticConfig config;
  if (!args.config.empty()) {
    nlohmann::json doc;
    try {
      doc = read_json_file(args.config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ConfigInvalid, e.detail());
      throw;
    }
    if (g.seed_given && doc.is_object()) doc["seed"] = g.seed;
    config = synthetic_config_from_json(doc);
  } else {
    config.seed = g.seed;
  }
  const SyntheticDataset data = generate_synthetic(config);
  write_synthetic(data, args.out_dir);
  out << "wrote " << data.training_frames.rows() << " training frames, " << config.windows
      << " test windows to " << args.out_dir << '\n';
  if (g.verbose) err << synthetic_config_to_json(data.config).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive algorithm-parameter selection over scenario subspaces", "adasel"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for clustering and synthetic data")->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Print per-window details to stderr");

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Design time: cluster, select platform, label");
  profile->add_option("--train", pa.train, "Training feature-stream manifest")->required()
      ->check(CLI::ExistingFile);
  profile->add_option("--perf", pa.perf, "Performance table CSV")->required()
      ->check(CLI::ExistingFile);
  profile->add_option("--platforms", pa.platforms, "Combo and platform catalog JSON")->required()
      ->check(CLI::ExistingFile);
  profile->add_option("--scenarios", pa.scenarios, "Number of scenarios M")->capture_default_str()
      ->check(CLI::PositiveNumber);
  profile->add_option("--subspace-dim", pa.subspace_dim, "Subspace dimension b")
      ->capture_default_str()->check(CLI::PositiveNumber);
  profile->add_option("--window-length", pa.window_length, "Default runtime window length")
      ->capture_default_str()->check(CLI::Range(2, std::numeric_limits<int>::max()));
  profile->add_option("--max-error", pa.max_error, "Bound on mean best error")
      ->check(CLI::NonNegativeNumber);
  profile->add_option("--required-fps", pa.required_fps, "Minimum frame rate")
      ->check(CLI::NonNegativeNumber);
  profile->add_option("--max-cost", pa.max_cost, "Platform cost budget")
      ->check(CLI::NonNegativeNumber);
  profile->add_option("--out", pa.out, "Output profile JSON")->required();

  SelectArgs sa;
  auto* select = app.add_subcommand("select", "Runtime: match windows and choose combos");
  select->add_option("--profile", sa.profile, "Design profile JSON")->required()
      ->check(CLI::ExistingFile);
  select->add_option("--stream", sa.stream, "Test feature-stream manifest")->required()
      ->check(CLI::ExistingFile);
  select->add_option("--platform", sa.platform, "Platform id (default: the profile's choice)");
  select->add_option("--window-length", sa.window_length, "Frames per window (default: profile)")
      ->check(CLI::Range(2, std::numeric_limits<int>::max()));
  select->add_option("--out", sa.out, "Output trace (JSON lines)")->required();
  select->add_option("--csv", sa.csv, "Output CSV projection (default: trace path with .csv)");
  select->add_flag("--no-timing", sa.no_timing, "Omit per-window latency for byte-stable traces");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score a trace against per-window errors");
  eval->add_option("--trace", ea.trace, "Selection trace")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", ea.truth, "Per-window error CSV")->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", ea.out, "Report path (.json for JSON, CSV otherwise)")->required();
  eval->add_option("--json", ea.json, "Additional JSON report path");

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--config", ya.config, "Synthetic config JSON (defaults if omitted)")
      ->check(CLI::ExistingFile);
  synth->add_option("--out-dir", ya.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  g.seed_given = app.get_option("--seed")->count() > 0;

  try {
    max_threads();  // validate ADASEL_THREADS before any work
    if (*profile) return cmd_profile(pa, g, out, err);
    if (*select) return cmd_select(sa, g, out, err);
    if (*eval) return cmd_eval(ea, g, out, err);
    if (*synth) return cmd_synth(ya, g, out, err);
  } catch (const NoFeasiblePlatformError& e) {
    err << "error: " << e.what() << '\n';
    print_diagnostics(err, e.diagnostics());
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace adasel::cli
