#pragma once

#include <cstddef>
#include <string_view>

namespace beliefmap::utf8 {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Number of unicode scalars in a UTF-8 string. Stray continuation bytes are
// counted as one scalar each so malformed input still gets a stable answer.
std::size_t scalar_count(std::string_view s);

// Longest prefix containing at most n scalars.
std::string_view scalar_prefix(std::string_view s, std::size_t n);

}  // namespace beliefmap::utf8
