#pragma once

#include <string>
#include <string_view>

#include "adasel/profile.hpp"

namespace adasel {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Content hash of a design profile: the canonical JSON metadata (without
/// sidecar paths) followed by every scenario's feature, basis and complement
/// in the binary matrix encoding.
std::string profile_digest(const DesignProfile& profile);

}  // namespace adasel
