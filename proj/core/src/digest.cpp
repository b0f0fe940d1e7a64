#include "adasel/digest.hpp"

#include <array>

#include <openssl/evp.h>

#include "adasel/dataio.hpp"

namespace adasel {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoError, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string profile_digest(const DesignProfile& profile) {
  std::string bytes = profile_to_json(profile, "").dump();
  for (const auto& s : profile.scenarios) {
    bytes += encode_matrix(s.representative_feature);
    bytes += encode_matrix(s.subspace.basis());
    bytes += encode_matrix(s.subspace.complement());
  }
  return sha256_hex(bytes);
}

}  // namespace adasel
