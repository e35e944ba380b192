#pragma once

#include <string>
#include <string_view>

namespace erdiff {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Content digest as git computes it for a blob: SHA-1 of "blob <size>\0" + bytes.
std::string git_blob_sha1(std::string_view bytes);

}  // namespace erdiff
