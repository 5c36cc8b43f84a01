#include "ctc/core_model.hpp"

#include <algorithm>
#include <string>

namespace ctc {

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string normalize_label(std::string_view label) {
    std::string out;
    bool pending_space = false;
    for (char c : label) {
        if (is_ascii_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

}  // namespace

CoarseType coarse_of(FineType fine) noexcept {
    switch (fine) {
        case FineType::character_error:
        case FineType::word_error:
            return CoarseType::spelling_error;
        case FineType::missing_error:
        case FineType::redundant_error:
        case FineType::disordered_error:
            return CoarseType::grammatical_error;
        case FineType::semantic_repetition:
        case FineType::syntactic_hybridity:
            return CoarseType::chinese_semantic_error;
    }
    return CoarseType::spelling_error;
}

std::string_view to_string(FineType fine) noexcept {
    switch (fine) {
        case FineType::character_error: return "character error";
        case FineType::word_error: return "word error";
        case FineType::missing_error: return "missing error";
        case FineType::redundant_error: return "redundant error";
        case FineType::disordered_error: return "disordered error";
        case FineType::semantic_repetition: return "semantic repetition";
        case FineType::syntactic_hybridity: return "syntactic hybridity";
    }
    return "";
}

std::string_view to_string(CoarseType coarse) noexcept {
    switch (coarse) {
        case CoarseType::spelling_error: return "spelling error";
        case CoarseType::grammatical_error: return "grammatical error";
        case CoarseType::chinese_semantic_error: return "Chinese semantic error";
    }
    return "";
}

std::optional<FineType> fine_type_from_string(std::string_view label) {
    const std::string key = normalize_label(label);
    for (FineType t : kAllFineTypes) {
        if (key == to_string(t)) {
            return t;
        }
    }
    return std::nullopt;
}

bool is_valid_pid(std::string_view pid) noexcept {
    if (pid.empty()) {
        return false;
    }
    return std::none_of(pid.begin(), pid.end(), [](char c) { return c == ',' || is_ascii_space(c); });
}

Passage Passage::make(std::string pid, Text text) {
    if (!is_valid_pid(pid)) {
        throw ModelError("invalid pid '" + pid + "'");
    }
    if (text.empty()) {
        throw ModelError("passage " + pid + " has empty text");
    }
    return Passage{std::move(pid), std::move(text)};
}

Passage Passage::from_utf8(std::string pid, std::string_view text) {
    return make(std::move(pid), decode_utf8(text));
}

std::string shape_violation(const Edit& edit) {
    const bool no_incorrect = edit.incorrect.empty();
    const bool no_correct = edit.correct.empty();
    if (no_incorrect && no_correct) {
        return "both spans empty";
    }
    switch (edit.type) {
        case FineType::missing_error:
            if (!no_incorrect) {
                return "missing error must have an empty incorrect span";
            }
            break;
        case FineType::redundant_error:
        case FineType::semantic_repetition:
        case FineType::syntactic_hybridity:
            if (!no_correct) {
                return std::string(to_string(edit.type)) + " must have an empty correct span";
            }
            break;
        case FineType::character_error:
        case FineType::word_error:
            if (no_incorrect || no_correct) {
                return std::string(to_string(edit.type)) + " needs both spans non-empty";
            }
            break;
        case FineType::disordered_error: {
            if (edit.incorrect == edit.correct) {
                return "disordered error must change the order";
            }
            Text a = edit.incorrect;
            Text b = edit.correct;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) {
                return "disordered error correct span is not a permutation of the incorrect span";
            }
            break;
        }
    }
    return {};
}

std::string binding_violation(const Edit& edit, TextView source) {
    if (edit.incorrect.empty() && edit.correct.empty()) {
        return "both spans empty";
    }
    if (edit.incorrect == edit.correct) {
        return "edit does not change the text";
    }
    if (edit.location > source.size()) {
        return "location out of range";
    }
    if (edit.location == source.size() && !edit.incorrect.empty()) {
        return "location out of range";
    }
    if (source.substr(edit.location, edit.incorrect.size()) != edit.incorrect) {
        return "span mismatch";
    }
    return {};
}

ValidationResult validate_annotation(const Annotation& annotation, const Passage& passage) {
    ValidationResult result;
    if (annotation.pid != passage.pid) {
        result.violations.push_back(
            {std::nullopt, "pid mismatch: annotation " + annotation.pid + " vs passage " + passage.pid});
    }
    const auto& edits = annotation.edits;
    for (std::size_t i = 0; i < edits.size(); ++i) {
        if (auto why = shape_violation(edits[i]); !why.empty()) {
            result.violations.push_back({i, why});
        }
        if (auto why = binding_violation(edits[i], passage.text); !why.empty() && why != "both spans empty") {
            result.violations.push_back({i, why});
        }
        if (i == 0) {
            continue;
        }
        const Edit& prev = edits[i - 1];
        if (edits[i].location <= prev.location) {
            result.violations.push_back({i, "locations not strictly ascending"});
        } else if (edits[i].location < prev.location + prev.incorrect.size()) {
            result.violations.push_back({i, "overlaps edit " + std::to_string(i - 1)});
        }
    }
    return result;
}

}  // namespace ctc
