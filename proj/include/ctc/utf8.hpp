#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ctc {

// Passage text is stored as a sequence of Unicode scalar values so that
// every location is a plain index: one character or punctuation mark is
// one position, regardless of its UTF-8 byte length.
using Text = std::u32string;
using TextView = std::u32string_view;

class Utf8Error : public std::runtime_error {
public:
    Utf8Error(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// Decodes strict UTF-8 (no overlongs, no surrogates, max U+10FFFF).
Text decode_utf8(std::string_view bytes);

std::string encode_utf8(TextView text);

bool is_valid_utf8(std::string_view bytes) noexcept;

/// Terminal column width of a string: 2 for East Asian wide/fullwidth
/// characters, 0 for combining marks, 1 otherwise.
std::size_t display_width(std::string_view utf8);

}  // namespace ctc
