#pragma once

#include <string>
#include <string_view>

namespace persuade {

// SHA-256 hex digest of a byte string.
std::string sha256_hex(std::string_view data);

// SHA-256 hex digest of a file's contents. Throws Error(Io).
std::string sha256_file_hex(const std::string& path);

// Leading slice of a hex digest, used for campaign ids.
std::string short_digest(std::string_view hex, std::size_t chars = 12);

}  // namespace persuade
