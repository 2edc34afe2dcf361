#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace affordlab {

// 64-bit FNV-1a. Incremental: feed the previous result back as `state`.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t state = kFnvOffset);
std::uint64_t fnv1a(std::string_view text, std::uint64_t state = kFnvOffset);

// 16 lowercase hex digits
std::string hex64(std::uint64_t value);

}  // namespace affordlab
