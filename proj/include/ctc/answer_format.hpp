#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctc/core_model.hpp"

namespace ctc {

/// Raised for any malformed passage or answer input. `line()` is 1-based and
/// zero when the error is not tied to a file line.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line),
          detail_(what) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

using AnswerMap = std::map<std::string, Annotation>;
using PassageMap = std::map<std::string, Passage>;

/// Non-fatal notices produced while reading a file (e.g. a stripped BOM).
using Warnings = std::vector<std::string>;

/// One answer line: "PID=<pid>, -1" or "PID=<pid>(, loc, type, incorrect, correct)+[,]".
/// The "PID=" prefix is optional on input.
Annotation parse_answer_line(std::string_view line);

/// Inverse of parse_answer_line, byte-compatible with the official examples.
/// Throws FormatError when a pid or span cannot be represented (ASCII comma,
/// line break, or leading/trailing ASCII space in a span).
std::string serialize_annotation(const Annotation& annotation);

std::vector<Passage> parse_passage_file(std::istream& in, Warnings* warnings = nullptr);
AnswerMap parse_answer_file(std::istream& in, Warnings* warnings = nullptr);

/// "PID=<pid>\t<text>", the form written by the corruptor and `apply`.
std::string serialize_passage(const Passage& passage);

PassageMap index_passages(const std::vector<Passage>& passages);

}  // namespace ctc
