#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

// UTF-8 aware helpers. Case folding is ASCII-only; bytes >= 0x80 compare
// exactly.
namespace gcagent::text {

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

// Number of code points. Invalid lead bytes count as one character each.
std::size_t char_count(std::string_view s);

// Byte offset just past the first `max_chars` code points.
std::size_t byte_offset_of_char(std::string_view s, std::size_t max_chars);

uint64_t fnv1a64(std::string_view data, uint64_t seed = 0);
std::string hex64(uint64_t value);

std::string hex_encode(std::string_view bytes);
// Returns false on odd length or a non-hex digit.
bool hex_decode(std::string_view hex, std::string& out);

}  // namespace gcagent::text
