#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adasel/profile.hpp"
#include "adasel/runtime.hpp"

namespace adasel {

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Binary matrix files: "ADSLMAT1", rows (u64 LE), cols (u64 LE), then
// rows·cols IEEE-754 doubles, little-endian, row-major.

std::string encode_matrix(const Eigen::Ref<const Matrix>& m);
Matrix decode_matrix(std::string_view bytes);
void write_matrix(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& m);
Matrix read_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// CSV tables.

/// Header: scenario_id,combo_id,platform_id,error followed by any number of
/// named numeric extra columns (MT, ML, IDS, FP, ...). Empty extra cells are
/// omitted from the record.
std::vector<PerformanceRecord> parse_performance_table(std::istream& in);
std::vector<PerformanceRecord> read_performance_table(const std::filesystem::path& path);
void write_performance_table(std::ostream& out, const std::vector<PerformanceRecord>& records);

/// Per-window, per-combo errors of a test stream, plus the generating
/// scenario of each window when known (empty string otherwise).
struct GroundTruth {
  std::vector<std::string> combo_ids;
  std::vector<int> window_ids;
  std::vector<std::string> scenario_ids;
  Matrix errors;  // windows × combos
  bool operator==(const GroundTruth&) const = default;
};

/// Long format, header window_id,scenario_id,combo_id,error; one row per
/// (window, combo). Every window must list the same combos.
GroundTruth parse_ground_truth(std::istream& in);
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

// ---------------------------------------------------------------------------
// Feature streams: a JSON manifest pointing at matrix files whose rows are
// frames.

struct StreamPart {
  std::string path;  // relative to the manifest's directory
  std::int64_t rows = 0;
  bool operator==(const StreamPart&) const = default;
};

struct FeatureStreamManifest {
  int format_version = kFormatVersion;
  int feature_dim = 0;
  std::int64_t frame_count = 0;
  std::string source;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<StreamPart> parts;
  std::vector<std::string> labels;  // per frame, optional
  bool operator==(const FeatureStreamManifest&) const = default;
};

struct FeatureStream {
  FeatureStreamManifest manifest;
  Matrix frames;
};

nlohmann::json manifest_to_json(const FeatureStreamManifest& manifest);
FeatureStreamManifest manifest_from_json(const nlohmann::json& doc);

/// Writes `<stem>.bin` next to the manifest and the manifest itself.
void write_feature_stream(const std::filesystem::path& manifest_path,
                          const Eigen::Ref<const Matrix>& frames,
                          const std::vector<std::string>& labels, const std::string& source,
                          const nlohmann::json& metadata = nlohmann::json::object());
FeatureStream read_feature_stream(const std::filesystem::path& manifest_path);

// ---------------------------------------------------------------------------
// Catalog: {"format_version", "combos": [...], "platforms": [...]}.

struct Catalog {
  std::vector<AlgoParamCombo> combos;
  std::vector<PlatformSpec> platforms;
};

nlohmann::json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const nlohmann::json& doc);
Catalog read_catalog(const std::filesystem::path& path);
void write_catalog(const std::filesystem::path& path, const Catalog& catalog);

// ---------------------------------------------------------------------------
// Design profiles: JSON document plus two matrix sidecars per scenario.

/// The JSON document with sidecar references. `sidecar_stem` prefixes the
/// sidecar file names; pass an empty stem for the path-free canonical form.
nlohmann::json profile_to_json(const DesignProfile& profile, const std::string& sidecar_stem);
void write_profile(const std::filesystem::path& path, const DesignProfile& profile);
DesignProfile read_profile(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Selection traces: JSON lines. The first line is a header object
// {"format_version", "profile_digest", "platform_id", "window_length"}; each
// further line is one decision.

std::string trace_to_jsonl(const SelectionTrace& trace);
SelectionTrace trace_from_jsonl(std::istream& in);
void write_trace(const std::filesystem::path& path, const SelectionTrace& trace);
SelectionTrace read_trace(const std::filesystem::path& path);

/// window_id,combo_id,similarity projection for plotting.
std::string trace_to_csv(const SelectionTrace& trace);

// ---------------------------------------------------------------------------

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Throws UnsupportedVersion when `version` is newer than this build reads.
void check_format_version(const nlohmann::json& doc, const std::string& what);

}  // namespace adasel
