#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "adasel/dataio.hpp"

namespace adasel {
namespace {

using nlohmann::json;

// JSON has no infinity; unbounded constraints are written as null.
json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

double bound_from_json(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

template <typename T>
T field(const json& doc, const char* key, const std::string& what) {
  if (!doc.is_object() || !doc.contains(key)) {
    fail(ErrorCode::ParseError, what + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, what + ": field '" + key + "': " + e.what());
  }
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array()) fail(ErrorCode::ParseError, what + " must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(ErrorCode::ParseError, what + " must contain numbers");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

json parse_json_text(const std::string& text, const std::string& what) {
  // nlohmann keeps the last of duplicate keys; reject them instead.
  std::vector<std::set<std::string>> open_objects;
  const json::parser_callback_t reject_duplicates = [&](int, json::parse_event_t event,
                                                        json& parsed) {
    if (event == json::parse_event_t::object_start) {
      open_objects.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      open_objects.pop_back();
    } else if (event == json::parse_event_t::key &&
               !open_objects.back().insert(parsed.get<std::string>()).second) {
      fail(ErrorCode::DuplicateKey, what + ": duplicate key '" + parsed.get<std::string>() + "'");
    }
    return true;
  };
  try {
    return json::parse(text, reject_duplicates);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

std::filesystem::path sibling(const std::filesystem::path& anchor, const std::string& name) {
  return anchor.parent_path() / name;
}

json combo_to_json(const AlgoParamCombo& c) {
  return {{"id", c.id},
          {"algorithm", c.algorithm},
          {"fps", c.fps},
          {"resolution", {{"width", c.resolution.width}, {"height", c.resolution.height}}}};
}

AlgoParamCombo combo_from_json(const json& doc) {
  AlgoParamCombo c;
  c.id = field<std::string>(doc, "id", "combo");
  c.algorithm = field<std::string>(doc, "algorithm", "combo '" + c.id + "'");
  c.fps = field<double>(doc, "fps", "combo '" + c.id + "'");
  const json res = field<json>(doc, "resolution", "combo '" + c.id + "'");
  c.resolution.width = field<int>(res, "width", "combo '" + c.id + "' resolution");
  c.resolution.height = field<int>(res, "height", "combo '" + c.id + "' resolution");
  return c;
}

json platform_to_json(const PlatformSpec& p) {
  return {{"id", p.id}, {"cost", p.cost}, {"capabilities", p.combo_capabilities}};
}

PlatformSpec platform_from_json(const json& doc) {
  PlatformSpec p;
  p.id = field<std::string>(doc, "id", "platform");
  p.cost = field<double>(doc, "cost", "platform '" + p.id + "'");
  p.combo_capabilities =
      field<std::map<std::string, double>>(doc, "capabilities", "platform '" + p.id + "'");
  return p;
}

json record_to_json(const PerformanceRecord& r) {
  json out = {{"scenario_id", r.scenario_id},
              {"combo_id", r.combo_id},
              {"platform_id", r.platform_id},
              {"error", r.error}};
  if (!r.extras.empty()) out["extras"] = r.extras;
  return out;
}

PerformanceRecord record_from_json(const json& doc) {
  PerformanceRecord r;
  r.scenario_id = field<std::string>(doc, "scenario_id", "performance record");
  r.combo_id = field<std::string>(doc, "combo_id", "performance record");
  r.platform_id = field<std::string>(doc, "platform_id", "performance record");
  r.error = field<double>(doc, "error", "performance record");
  if (doc.contains("extras")) r.extras = field<std::map<std::string, double>>(doc, "extras", "record");
  return r;
}

}  // namespace

void check_format_version(const json& doc, const std::string& what) {
  const int version = field<int>(doc, "format_version", what);
  if (version > kFormatVersion) {
    fail(ErrorCode::UnsupportedVersion, what + " has format_version " + std::to_string(version) +
                                            "; this build reads up to " +
                                            std::to_string(kFormatVersion));
  }
  if (version < 1) fail(ErrorCode::ParseError, what + " has invalid format_version");
}

json read_json_file(const std::filesystem::path& path) {
  return parse_json_text(read_text_file(path), path.string());
}

// --- manifests -------------------------------------------------------------

json manifest_to_json(const FeatureStreamManifest& m) {
  json parts = json::array();
  for (const auto& p : m.parts) parts.push_back({{"path", p.path}, {"rows", p.rows}});
  json out = {{"format_version", m.format_version},
              {"a", m.feature_dim},
              {"frame_count", m.frame_count},
              {"source", m.source},
              {"metadata", m.metadata},
              {"parts", parts}};
  if (!m.labels.empty()) out["labels"] = m.labels;
  return out;
}

FeatureStreamManifest manifest_from_json(const json& doc) {
  check_format_version(doc, "feature stream manifest");
  FeatureStreamManifest m;
  m.format_version = field<int>(doc, "format_version", "manifest");
  m.feature_dim = field<int>(doc, "a", "manifest");
  m.frame_count = field<std::int64_t>(doc, "frame_count", "manifest");
  m.source = doc.value("source", std::string{});
  m.metadata = doc.value("metadata", json::object());
  for (const auto& p : field<json>(doc, "parts", "manifest")) {
    m.parts.push_back({field<std::string>(p, "path", "manifest part"),
                       field<std::int64_t>(p, "rows", "manifest part")});
  }
  if (doc.contains("labels")) m.labels = field<std::vector<std::string>>(doc, "labels", "manifest");
  if (m.feature_dim < 2) fail(ErrorCode::ParseError, "manifest: a must be >= 2");
  if (m.parts.empty()) fail(ErrorCode::ParseError, "manifest lists no matrix parts");
  if (!m.labels.empty() && static_cast<std::int64_t>(m.labels.size()) != m.frame_count) {
    fail(ErrorCode::DimensionMismatch, "manifest has " + std::to_string(m.labels.size()) +
                                           " labels for " + std::to_string(m.frame_count) +
                                           " frames");
  }
  return m;
}

void write_feature_stream(const std::filesystem::path& manifest_path,
                          const Eigen::Ref<const Matrix>& frames,
                          const std::vector<std::string>& labels, const std::string& source,
                          const json& metadata) {
  const std::string bin_name = manifest_path.stem().string() + ".bin";
  write_matrix(sibling(manifest_path, bin_name), frames);
  FeatureStreamManifest m;
  m.feature_dim = static_cast<int>(frames.cols());
  m.frame_count = frames.rows();
  m.source = source;
  m.metadata = metadata;
  m.parts = {{bin_name, frames.rows()}};
  m.labels = labels;
  write_text_file(manifest_path, manifest_to_json(m).dump(2) + "\n");
}

FeatureStream read_feature_stream(const std::filesystem::path& manifest_path) {
  FeatureStream stream;
  stream.manifest = manifest_from_json(read_json_file(manifest_path));
  const auto& m = stream.manifest;
  std::vector<Matrix> blocks;
  std::int64_t total = 0;
  for (const auto& part : m.parts) {
    Matrix block = read_matrix(sibling(manifest_path, part.path));
    if (block.cols() != m.feature_dim) {
      fail(ErrorCode::DimensionMismatch, part.path + " has " + std::to_string(block.cols()) +
                                             " columns, manifest says a=" +
                                             std::to_string(m.feature_dim));
    }
    if (block.rows() != part.rows) {
      fail(ErrorCode::DimensionMismatch, part.path + " has " + std::to_string(block.rows()) +
                                             " rows, manifest says " + std::to_string(part.rows));
    }
    total += block.rows();
    blocks.push_back(std::move(block));
  }
  if (total != m.frame_count) {
    fail(ErrorCode::DimensionMismatch, "parts hold " + std::to_string(total) +
                                           " frames, manifest says " +
                                           std::to_string(m.frame_count));
  }
  stream.frames.resize(total, m.feature_dim);
  Eigen::Index row = 0;
  for (const auto& block : blocks) {
    stream.frames.middleRows(row, block.rows()) = block;
    row += block.rows();
  }
  require_finite(stream.frames, manifest_path.string().c_str());
  return stream;
}

// --- catalog ---------------------------------------------------------------

json catalog_to_json(const Catalog& catalog) {
  json combos = json::array();
  for (const auto& c : catalog.combos) combos.push_back(combo_to_json(c));
  json platforms = json::array();
  for (const auto& p : catalog.platforms) platforms.push_back(platform_to_json(p));
  return {{"format_version", kFormatVersion}, {"combos", combos}, {"platforms", platforms}};
}

Catalog catalog_from_json(const json& doc) {
  check_format_version(doc, "platform catalog");
  Catalog catalog;
  for (const auto& c : field<json>(doc, "combos", "catalog")) catalog.combos.push_back(combo_from_json(c));
  for (const auto& p : field<json>(doc, "platforms", "catalog")) {
    catalog.platforms.push_back(platform_from_json(p));
  }
  validate_catalog(catalog.combos, catalog.platforms);
  return catalog;
}

Catalog read_catalog(const std::filesystem::path& path) {
  return catalog_from_json(read_json_file(path));
}

void write_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  write_text_file(path, catalog_to_json(catalog).dump(2) + "\n");
}

// --- profiles --------------------------------------------------------------

json profile_to_json(const DesignProfile& profile, const std::string& sidecar_stem) {
  const auto& cfg = profile.config;
  json config = {{"ambient_dim", cfg.ambient_dim},
                 {"subspace_dim", cfg.subspace_dim},
                 {"scenario_count", cfg.scenario_count},
                 {"window_length", cfg.window_length},
                 {"seed", cfg.seed},
                 {"constraints",
                  {{"max_mean_error", bound_to_json(cfg.constraints.max_mean_error)},
                   {"required_fps", cfg.constraints.required_fps},
                   {"max_cost", bound_to_json(cfg.constraints.max_cost)}}}};
  json catalog = catalog_to_json({profile.combos, profile.platforms});
  json performance = json::array();
  for (const auto& r : profile.performance) performance.push_back(record_to_json(r));

  json scenarios = json::array();
  for (std::size_t k = 0; k < profile.scenarios.size(); ++k) {
    const auto& s = profile.scenarios[k];
    json entry = {{"scenario_id", s.scenario_id},
                  {"member_count", s.member_count},
                  {"representative_feature", vector_to_json(s.representative_feature)},
                  {"subspace_dim", s.subspace.dim()},
                  {"labels", s.labels}};
    if (!sidecar_stem.empty()) {
      const std::string prefix = sidecar_stem + ".scenario-" + std::to_string(k);
      entry["basis_file"] = prefix + ".basis.bin";
      entry["complement_file"] = prefix + ".complement.bin";
    }
    scenarios.push_back(std::move(entry));
  }
  return {{"format_version", kFormatVersion},
          {"config", config},
          {"selected_platform", profile.selected_platform},
          {"combos", catalog["combos"]},
          {"platforms", catalog["platforms"]},
          {"performance", performance},
          {"scenarios", scenarios}};
}

void write_profile(const std::filesystem::path& path, const DesignProfile& profile) {
  const std::string stem = path.stem().string();
  const json doc = profile_to_json(profile, stem);
  for (std::size_t k = 0; k < profile.scenarios.size(); ++k) {
    const auto& entry = doc["scenarios"][k];
    write_matrix(sibling(path, entry["basis_file"].get<std::string>()),
                 profile.scenarios[k].subspace.basis());
    write_matrix(sibling(path, entry["complement_file"].get<std::string>()),
                 profile.scenarios[k].subspace.complement());
  }
  write_text_file(path, doc.dump(2) + "\n");
}

DesignProfile read_profile(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  check_format_version(doc, "design profile");
  DesignProfile profile;

  const json cfg = field<json>(doc, "config", "profile");
  profile.config.ambient_dim = field<int>(cfg, "ambient_dim", "profile config");
  profile.config.subspace_dim = field<int>(cfg, "subspace_dim", "profile config");
  profile.config.scenario_count = field<int>(cfg, "scenario_count", "profile config");
  profile.config.window_length = field<int>(cfg, "window_length", "profile config");
  profile.config.seed = field<std::uint64_t>(cfg, "seed", "profile config");
  const json cons = field<json>(cfg, "constraints", "profile config");
  profile.config.constraints.max_mean_error =
      bound_from_json(field<json>(cons, "max_mean_error", "constraints"));
  profile.config.constraints.required_fps = field<double>(cons, "required_fps", "constraints");
  profile.config.constraints.max_cost = bound_from_json(field<json>(cons, "max_cost", "constraints"));

  profile.selected_platform = field<std::string>(doc, "selected_platform", "profile");
  const Catalog catalog = catalog_from_json(
      {{"format_version", kFormatVersion}, {"combos", doc.value("combos", json::array())},
       {"platforms", doc.value("platforms", json::array())}});
  profile.combos = catalog.combos;
  profile.platforms = catalog.platforms;
  for (const auto& r : field<json>(doc, "performance", "profile")) {
    profile.performance.push_back(record_from_json(r));
  }

  for (const auto& entry : field<json>(doc, "scenarios", "profile")) {
    ScenarioProfile s;
    s.scenario_id = field<std::string>(entry, "scenario_id", "scenario");
    const std::string what = "scenario '" + s.scenario_id + "'";
    s.member_count = field<int>(entry, "member_count", what);
    s.representative_feature =
        vector_from_json(field<json>(entry, "representative_feature", what), what + " feature");
    s.labels = field<std::map<std::string, std::string>>(entry, "labels", what);
    Matrix basis = read_matrix(sibling(path, field<std::string>(entry, "basis_file", what)));
    Matrix complement =
        read_matrix(sibling(path, field<std::string>(entry, "complement_file", what)));
    s.subspace = SubspaceBasis::from_parts(std::move(basis), std::move(complement));
    if (s.subspace.ambient_dim() != profile.config.ambient_dim ||
        s.representative_feature.size() != profile.config.ambient_dim) {
      fail(ErrorCode::DimensionMismatch, what + " does not match ambient_dim");
    }
    profile.scenarios.push_back(std::move(s));
  }
  return profile;
}

// --- traces ----------------------------------------------------------------

std::string trace_to_jsonl(const SelectionTrace& trace) {
  std::string out = json{{"format_version", kFormatVersion},
                         {"profile_digest", trace.profile_digest},
                         {"platform_id", trace.platform_id},
                         {"window_length", trace.window_length}}
                        .dump();
  out += '\n';
  for (const auto& d : trace.decisions) {
    json line = {{"window_id", d.window_id},
                 {"first_frame", d.first_frame},
                 {"frame_count", d.frame_count},
                 {"matched_scenario", d.matched_scenario_id},
                 {"similarity", d.similarity},
                 {"similarities", d.all_similarities},
                 {"combo", d.chosen_combo_id},
                 {"platform", d.platform_id},
                 {"degraded", d.degraded}};
    if (d.elapsed_ms) line["elapsed_ms"] = *d.elapsed_ms;
    out += line.dump();
    out += '\n';
  }
  return out;
}

SelectionTrace trace_from_jsonl(std::istream& in) {
  std::string line;
  int line_no = 0;
  SelectionTrace trace;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json doc = parse_json_text(line, "trace line " + std::to_string(line_no));
    if (!header_seen) {
      check_format_version(doc, "selection trace");
      trace.profile_digest = field<std::string>(doc, "profile_digest", "trace header");
      trace.platform_id = field<std::string>(doc, "platform_id", "trace header");
      trace.window_length = field<int>(doc, "window_length", "trace header");
      header_seen = true;
      continue;
    }
    const std::string what = "trace line " + std::to_string(line_no);
    SelectionDecision d;
    d.window_id = field<int>(doc, "window_id", what);
    d.first_frame = field<Eigen::Index>(doc, "first_frame", what);
    d.frame_count = field<Eigen::Index>(doc, "frame_count", what);
    d.matched_scenario_id = field<std::string>(doc, "matched_scenario", what);
    d.similarity = field<double>(doc, "similarity", what);
    d.all_similarities = field<std::vector<double>>(doc, "similarities", what);
    d.chosen_combo_id = field<std::string>(doc, "combo", what);
    d.platform_id = field<std::string>(doc, "platform", what);
    d.degraded = field<bool>(doc, "degraded", what);
    if (doc.contains("elapsed_ms")) d.elapsed_ms = field<double>(doc, "elapsed_ms", what);
    if (d.window_id != static_cast<int>(trace.decisions.size())) {
      fail(ErrorCode::ParseError, what + ": window ids must be contiguous from 0");
    }
    trace.decisions.push_back(std::move(d));
  }
  if (!header_seen) fail(ErrorCode::ParseError, "trace is empty");
  return trace;
}

void write_trace(const std::filesystem::path& path, const SelectionTrace& trace) {
  write_text_file(path, trace_to_jsonl(trace));
}

SelectionTrace read_trace(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  try {
    return trace_from_jsonl(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string trace_to_csv(const SelectionTrace& trace) {
  std::string out = "window_id,combo_id,similarity\n";
  for (const auto& d : trace.decisions) {
    out += std::to_string(d.window_id) + ',' + d.chosen_combo_id + ',' +
           format_double(d.similarity) + '\n';
  }
  return out;
}

}  // namespace adasel
