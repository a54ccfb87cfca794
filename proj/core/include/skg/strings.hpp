#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace skg {

// Locale-independent ASCII helpers. Corpus text is UTF-8; everything that
// needs case handling only cares about the ASCII range.
inline bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool ascii_alpha(char c) { return ascii_upper(c) || ascii_lower(c); }
inline bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool ascii_alnum(char c) { return ascii_alpha(c) || ascii_digit(c); }
inline bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline char to_lower(char c) { return ascii_upper(c) ? static_cast<char>(c + 32) : c; }
inline char to_upper(char c) { return ascii_lower(c) ? static_cast<char>(c - 32) : c; }

std::string lowercased(std::string_view s);
std::string_view trimmed(std::string_view s);
std::string collapse_spaces(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_digit(std::string_view s);

// UTF-8 decoding; returns the code point at byte position i and advances i.
// Malformed sequences decode as U+FFFD one byte at a time.
char32_t utf8_next(std::string_view s, size_t& i);
void utf8_append(std::string& out, char32_t cp);

// FNV-1a, used for stable resource ids and manifest hashes.
uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

// RFC 4180 field quoting.
std::string csv_field(std::string_view s);

}  // namespace skg
