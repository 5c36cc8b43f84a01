#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "ctc/core_model.hpp"

namespace ctc {

/// Minimal contiguous rewrite of a source string: `incorrect` and `correct`
/// share no common prefix or suffix. Two single edits on the same source
/// produce the same corrected string exactly when their canonical forms are
/// equal.
struct CanonicalEdit {
    std::size_t location = 0;
    Text incorrect;
    Text correct;

    friend bool operator==(const CanonicalEdit&, const CanonicalEdit&) = default;
    friend auto operator<=>(const CanonicalEdit&, const CanonicalEdit&) = default;
};

class InvalidAnnotation : public std::invalid_argument {
public:
    InvalidAnnotation(const std::string& what, ValidationResult result)
        : std::invalid_argument(what), result_(std::move(result)) {}

    const ValidationResult& result() const noexcept { return result_; }

private:
    ValidationResult result_;
};

/// Applies every edit of a validated annotation. Locations refer to the
/// original text. Throws InvalidAnnotation (and changes nothing) when
/// validation fails.
Text apply_edits(const Passage& passage, const Annotation& annotation);

/// Solo application of one edit. Only the span binding is checked; the error
/// type plays no part.
Text apply_edit(TextView source, const Edit& edit);
Text apply_edit(TextView source, const CanonicalEdit& edit);

/// Longest common prefix first, then the longest common suffix that does not
/// overlap it. Returns nullopt when the strings are equal.
std::optional<CanonicalEdit> extract_min_edit(TextView source, TextView target);

CanonicalEdit canonicalize(TextView source, const Edit& edit);
CanonicalEdit canonicalize(const Passage& passage, const Edit& edit);

}  // namespace ctc
