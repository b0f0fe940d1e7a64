#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "adasel/dataio.hpp"

namespace adasel {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool next_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

[[noreturn]] void malformed(int line_no, const std::string& why) {
  fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
}

double parse_number(const std::string& text, int line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    malformed(line_no, "column '" + column + "' is not a number: '" + text + "'");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::vector<PerformanceRecord> parse_performance_table(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no)) malformed(1, "missing header");
  const auto header = split_csv(line);
  static const std::vector<std::string> kRequired = {"scenario_id", "combo_id", "platform_id",
                                                     "error"};
  if (header.size() < kRequired.size() ||
      !std::equal(kRequired.begin(), kRequired.end(), header.begin())) {
    malformed(line_no, "header must start with scenario_id,combo_id,platform_id,error");
  }
  for (std::size_t c = kRequired.size(); c < header.size(); ++c) {
    if (header[c].empty()) malformed(line_no, "empty extra column name");
  }

  std::vector<PerformanceRecord> records;
  std::map<std::tuple<std::string, std::string, std::string>, int> seen;
  while (next_line(in, line, line_no)) {
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    }
    PerformanceRecord record;
    record.scenario_id = fields[0];
    record.combo_id = fields[1];
    record.platform_id = fields[2];
    if (record.scenario_id.empty() || record.combo_id.empty() || record.platform_id.empty()) {
      malformed(line_no, "empty key field");
    }
    record.error = parse_number(fields[3], line_no, "error");
    if (record.error < 0.0) {
      fail(ErrorCode::NegativeError,
           "line " + std::to_string(line_no) + ": error " + fields[3] + " is negative");
    }
    for (std::size_t c = kRequired.size(); c < header.size(); ++c) {
      if (!fields[c].empty()) record.extras[header[c]] = parse_number(fields[c], line_no, header[c]);
    }
    const auto key = std::make_tuple(record.scenario_id, record.combo_id, record.platform_id);
    if (const auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
      fail(ErrorCode::DuplicateKey, "lines " + std::to_string(it->second) + " and " +
                                        std::to_string(line_no) + " both define (" +
                                        record.scenario_id + ", " + record.combo_id + ", " +
                                        record.platform_id + ")");
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<PerformanceRecord> read_performance_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_performance_table(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

void write_performance_table(std::ostream& out, const std::vector<PerformanceRecord>& records) {
  std::set<std::string> extra_names;
  for (const auto& r : records) {
    for (const auto& [name, value] : r.extras) extra_names.insert(name);
  }
  out << "scenario_id,combo_id,platform_id,error";
  for (const auto& name : extra_names) out << ',' << name;
  out << '\n';
  for (const auto& r : records) {
    out << r.scenario_id << ',' << r.combo_id << ',' << r.platform_id << ','
        << format_double(r.error);
    for (const auto& name : extra_names) {
      out << ',';
      if (const auto it = r.extras.find(name); it != r.extras.end()) out << format_double(it->second);
    }
    out << '\n';
  }
}

GroundTruth parse_ground_truth(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no) || line != "window_id,scenario_id,combo_id,error") {
    malformed(line_no, "header must be window_id,scenario_id,combo_id,error");
  }

  struct Row {
    int window;
    std::string scenario;
    std::string combo;
    double error;
  };
  std::vector<Row> rows;
  while (next_line(in, line, line_no)) {
    const auto fields = split_csv(line);
    if (fields.size() != 4) malformed(line_no, "expected 4 fields");
    int window = 0;
    const auto [ptr, ec] =
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), window);
    if (fields[0].empty() || ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) {
      malformed(line_no, "window_id is not an integer");
    }
    if (fields[2].empty()) malformed(line_no, "empty combo_id");
    const double error = parse_number(fields[3], line_no, "error");
    if (error < 0.0) {
      fail(ErrorCode::NegativeError, "line " + std::to_string(line_no) + ": negative error");
    }
    rows.push_back({window, fields[1], fields[2], error});
  }

  GroundTruth truth;
  std::map<std::string, std::size_t> combo_col;
  for (const auto& r : rows) {
    if (combo_col.emplace(r.combo, truth.combo_ids.size()).second) truth.combo_ids.push_back(r.combo);
  }
  std::map<int, std::size_t> window_row;
  for (const auto& r : rows) {
    if (window_row.emplace(r.window, truth.window_ids.size()).second) {
      truth.window_ids.push_back(r.window);
      truth.scenario_ids.push_back(r.scenario);
    }
  }
  const double missing = -1.0;
  truth.errors = Matrix::Constant(static_cast<Eigen::Index>(truth.window_ids.size()),
                                  static_cast<Eigen::Index>(truth.combo_ids.size()), missing);
  for (const auto& r : rows) {
    const auto w = window_row[r.window];
    const auto c = combo_col[r.combo];
    if (truth.errors(w, c) != missing) {
      fail(ErrorCode::DuplicateKey, "window " + std::to_string(r.window) + " lists combo '" +
                                        r.combo + "' twice");
    }
    if (truth.scenario_ids[w] != r.scenario) {
      fail(ErrorCode::MalformedRow,
           "window " + std::to_string(r.window) + " has inconsistent scenario ids");
    }
    truth.errors(w, c) = r.error;
  }
  if ((truth.errors.array() == missing).any()) {
    fail(ErrorCode::MissingRecord, "every window must list an error for every combo");
  }
  return truth;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_ground_truth(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  out << "window_id,scenario_id,combo_id,error\n";
  for (std::size_t w = 0; w < truth.window_ids.size(); ++w) {
    for (std::size_t c = 0; c < truth.combo_ids.size(); ++c) {
      out << truth.window_ids[w] << ',' << truth.scenario_ids[w] << ',' << truth.combo_ids[c]
          << ',' << format_double(truth.errors(static_cast<Eigen::Index>(w),
                                               static_cast<Eigen::Index>(c)))
          << '\n';
    }
  }
}

}  // namespace adasel
