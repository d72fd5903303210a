#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cardgen::text {

std::string_view trim(std::string_view s);

std::string lower_ascii(std::string_view s);

// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Lowercased maximal alphanumeric runs; everything else is a separator.
// "The cat-sat." -> [the, cat, sat]; "GPT3.5" -> [gpt3, 5].
std::vector<std::string> tokenize_alnum(std::string_view s);

// Splits on '\n' without keeping terminators; a trailing newline does not
// produce a final empty line.
std::vector<std::string_view> split_lines(std::string_view s);

// Extracts items from a numbered list ("1. foo", "2) bar"). Lines that do
// not look like list items are ignored. Empty result means unparseable.
std::vector<std::string> parse_numbered_list(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);

std::string to_hex(std::uint64_t v);

// SplitMix64 mixer; the seed source for all shuffles.
std::uint64_t splitmix64(std::uint64_t x);

// Byte offsets of UTF-8 code point starts, plus s.size() as a sentinel.
// Invalid bytes count as one code point each.
std::vector<std::size_t> utf8_offsets(std::string_view s);

}  // namespace cardgen::text
