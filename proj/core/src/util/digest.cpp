#include "deforsc/util/digest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "deforsc/errors.hpp"

namespace deforsc {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

std::string digest_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read file for digest: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return digest_hex(fnv1a64(ss.str()));
}

}  // namespace deforsc
