#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace semeval::unicode {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset into the source
  std::size_t length;  // encoded byte length
};

/// Lenient UTF-8 decode: an invalid byte becomes U+FFFD of length 1.
std::vector<CodePoint> decode(std::string_view utf8);

bool is_whitespace(char32_t cp) noexcept;
bool is_punctuation(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;
void append_utf8(std::string& out, char32_t cp);

}  // namespace semeval::unicode
