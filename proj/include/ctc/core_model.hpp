#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctc/utf8.hpp"

namespace ctc {

/// Fine-grained error categories. The declaration order is the order of
/// the official taxonomy and is relied on by the reporting tables.
enum class FineType {
    character_error,
    word_error,
    missing_error,
    redundant_error,
    disordered_error,
    semantic_repetition,
    syntactic_hybridity,
};

enum class CoarseType {
    spelling_error,
    grammatical_error,
    chinese_semantic_error,
};

inline constexpr std::array<FineType, 7> kAllFineTypes = {
    FineType::character_error,  FineType::word_error,          FineType::missing_error,
    FineType::redundant_error,  FineType::disordered_error,    FineType::semantic_repetition,
    FineType::syntactic_hybridity,
};

inline constexpr std::array<CoarseType, 3> kAllCoarseTypes = {
    CoarseType::spelling_error,
    CoarseType::grammatical_error,
    CoarseType::chinese_semantic_error,
};

CoarseType coarse_of(FineType fine) noexcept;

/// Canonical lowercase label, e.g. "missing error".
std::string_view to_string(FineType fine) noexcept;
std::string_view to_string(CoarseType coarse) noexcept;

/// Case-insensitive lookup; runs of ASCII whitespace are collapsed and the
/// ends trimmed before comparing.
std::optional<FineType> fine_type_from_string(std::string_view label);

bool is_valid_pid(std::string_view pid) noexcept;

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Passage {
    std::string pid;
    Text text;

    /// Checked construction; throws ModelError on an invalid pid or empty text.
    static Passage make(std::string pid, Text text);
    static Passage from_utf8(std::string pid, std::string_view text);

    friend bool operator==(const Passage&, const Passage&) = default;
};

struct Edit {
    std::size_t location = 0;
    FineType type = FineType::character_error;
    Text incorrect;
    Text correct;

    friend bool operator==(const Edit&, const Edit&) = default;
};

/// An empty edit list is the "-1" answer: the passage has no error.
struct Annotation {
    std::string pid;
    std::vector<Edit> edits;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Violation {
    std::optional<std::size_t> edit_index;  // unset for annotation-wide problems
    std::string reason;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Type-dependent shape rules (e.g. missing error needs an empty incorrect
/// span). Returns an empty string when the edit is well formed.
std::string shape_violation(const Edit& edit);

/// Binding of one edit to a source text: not both spans empty, location in
/// range, and the incorrect span actually present at the location. Error type
/// is ignored. Returns an empty string when the edit binds.
std::string binding_violation(const Edit& edit, TextView source);

/// Every violation found, each tagged with the offending edit index.
ValidationResult validate_annotation(const Annotation& annotation, const Passage& passage);

}  // namespace ctc
