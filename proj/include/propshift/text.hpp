#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace propshift {

/// Canonical form used for every comparison against stored query strings:
/// typographic quotes become ASCII, whitespace runs collapse to one space,
/// the ends are trimmed and a trailing run of sentence terminators is cut
/// down to its first character.
std::string normalize_text(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

std::vector<std::string> split_words(std::string_view text);
std::string join_words(const std::vector<std::string>& words, std::size_t begin = 0,
                       std::size_t end = std::string::npos);

bool starts_with_ci(std::string_view text, std::string_view prefix);

/// Hex FNV-1a 64 digest; stable across platforms and runs.
std::string fnv1a_hex(std::string_view data);

}  // namespace propshift
