#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace bcpnn {

/// FNV-1a 64-bit content digest. Used to stamp ontology documents, model
/// snapshots and reports so identical content always carries an identical id.
inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string digest_hex(uint64_t digest) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return std::string(buf);
}

inline std::string digest_hex(std::string_view bytes) { return digest_hex(fnv1a64(bytes)); }

}  // namespace bcpnn
