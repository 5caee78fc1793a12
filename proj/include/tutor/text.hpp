#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tutor {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_space(char c) noexcept;

std::vector<std::string> split_lines(std::string_view text);

// "one" .. "ten", decimal digits beyond.
std::string number_word(int n);

// At most `width` characters of `text` starting near `offset`.
std::string excerpt_at(std::string_view text, std::size_t offset, std::size_t width = 80);

// FNV-1a 64-bit, rendered as 16 lowercase hex digits.
std::string fingerprint(std::string_view text);

}  // namespace tutor
