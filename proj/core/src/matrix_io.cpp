#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "adasel/dataio.hpp"

namespace adasel {
namespace {

constexpr std::string_view kMagic = "ADSLMAT1";
constexpr std::size_t kHeaderSize = 8 + 8 + 8;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string encode_matrix(const Eigen::Ref<const Matrix>& m) {
  std::string out;
  out.reserve(kHeaderSize + static_cast<std::size_t>(m.size()) * 8);
  out.append(kMagic);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
  }
  return out;
}

Matrix decode_matrix(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    fail(ErrorCode::BadMagic, "matrix file does not start with ADSLMAT1");
  }
  if (bytes.size() < kHeaderSize) fail(ErrorCode::TruncatedPayload, "matrix header is incomplete");
  const std::uint64_t rows = get_u64(bytes, 8);
  const std::uint64_t cols = get_u64(bytes, 16);

  constexpr auto kMaxIndex = static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max());
  const std::uint64_t limit = (std::numeric_limits<std::size_t>::max() - kHeaderSize) / 8;
  if (rows > kMaxIndex || cols > kMaxIndex || (cols != 0 && rows > limit / cols)) {
    fail(ErrorCode::DimensionOverflow,
         std::to_string(rows) + "x" + std::to_string(cols) + " exceeds the addressable size");
  }
  const std::uint64_t payload = rows * cols * 8;
  const std::uint64_t available = bytes.size() - kHeaderSize;
  if (available < payload) {
    fail(ErrorCode::TruncatedPayload, "header claims " + std::to_string(rows) + "x" +
                                          std::to_string(cols) + " (" + std::to_string(payload) +
                                          " bytes) but only " + std::to_string(available) +
                                          " bytes follow");
  }
  if (available > payload) {
    fail(ErrorCode::TrailingBytes,
         std::to_string(available - payload) + " unexpected bytes after the payload");
  }

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::size_t offset = kHeaderSize;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c, offset += 8) {
      m(r, c) = std::bit_cast<double>(get_u64(bytes, offset));
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& m) {
  write_text_file(path, encode_matrix(m));
}

Matrix read_matrix(const std::filesystem::path& path) {
  try {
    return decode_matrix(read_text_file(path));
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) fail(ErrorCode::InvalidArgument, "cannot format double");
  return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace adasel
