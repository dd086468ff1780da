#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace a11y::text {

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

std::size_t codepoint_count(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_words(std::string_view s);

/// True when the text carries no letters or digits (emoji, arrows, stars...).
bool is_glyph_only(std::string_view s);

/// Lowercase ASCII slug: letters/digits kept, runs of anything else become '_'.
std::string slugify(std::string_view s);

}  // namespace a11y::text
