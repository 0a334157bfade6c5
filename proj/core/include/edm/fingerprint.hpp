#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace edm {

// 64-bit FNV-1a. Used for schema/config fingerprints and artifact hashes, not
// for anything security-relevant.
std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace edm
