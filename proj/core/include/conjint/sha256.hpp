#pragma once

#include <cstdint>
#include <string>

namespace conjint {

/// SHA-256 digest of `data`, as a lowercase hex string.
std::string sha256_hex(const std::string& data);

}  // namespace conjint
