// FNV-1a 64-bit digests for the run manifest. Not cryptographic; the manifest
// only needs a stable fingerprint to detect that inputs/outputs changed.
#pragma once

#include <cstdint>
#include <string>

namespace deforsc {

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);

// Digest of a file's bytes, rendered as 16 lowercase hex digits.
// Throws SchemaError if the file cannot be read.
std::string file_digest_hex(const std::string& path);

std::string digest_hex(std::uint64_t h);

}  // namespace deforsc
