#include "ctc/edit_engine.hpp"

#include <algorithm>

namespace ctc {

namespace {

Text splice(TextView source, std::size_t location, std::size_t removed, TextView inserted) {
    Text out;
    out.reserve(source.size() - removed + inserted.size());
    out.append(source.substr(0, location));
    out.append(inserted);
    out.append(source.substr(location + removed));
    return out;
}

}  // namespace

Text apply_edits(const Passage& passage, const Annotation& annotation) {
    ValidationResult result = validate_annotation(annotation, passage);
    if (!result.ok()) {
        const Violation& first = result.violations.front();
        std::string what = "annotation " + annotation.pid + " is invalid: ";
        if (first.edit_index) {
            what += "edit " + std::to_string(*first.edit_index) + ": ";
        }
        what += first.reason;
        throw InvalidAnnotation(what, std::move(result));
    }
    // Right to left, so the locations of earlier edits stay valid.
    Text text = passage.text;
    for (auto it = annotation.edits.rbegin(); it != annotation.edits.rend(); ++it) {
        text.replace(it->location, it->incorrect.size(), it->correct);
    }
    return text;
}

Text apply_edit(TextView source, const Edit& edit) {
    if (auto why = binding_violation(edit, source); !why.empty()) {
        throw std::invalid_argument("edit at " + std::to_string(edit.location) + ": " + why);
    }
    return splice(source, edit.location, edit.incorrect.size(), edit.correct);
}

Text apply_edit(TextView source, const CanonicalEdit& edit) {
    if (edit.location + edit.incorrect.size() > source.size() ||
        source.substr(edit.location, edit.incorrect.size()) != edit.incorrect) {
        throw std::invalid_argument("canonical edit at " + std::to_string(edit.location) + ": span mismatch");
    }
    return splice(source, edit.location, edit.incorrect.size(), edit.correct);
}

std::optional<CanonicalEdit> extract_min_edit(TextView source, TextView target) {
    if (source == target) {
        return std::nullopt;
    }
    const std::size_t limit = std::min(source.size(), target.size());
    std::size_t prefix = 0;
    while (prefix < limit && source[prefix] == target[prefix]) {
        ++prefix;
    }
    // The suffix may not reach back into the prefix of the shorter string.
    std::size_t suffix = 0;
    while (prefix + suffix < limit &&
           source[source.size() - 1 - suffix] == target[target.size() - 1 - suffix]) {
        ++suffix;
    }
    return CanonicalEdit{
        prefix,
        Text(source.substr(prefix, source.size() - prefix - suffix)),
        Text(target.substr(prefix, target.size() - prefix - suffix)),
    };
}

// Same result as extract_min_edit(source, apply_edit(source, edit)), computed
// against the corrected string without building it. Everything before the
// edit location and after its span is shared by construction.
CanonicalEdit canonicalize(TextView source, const Edit& edit) {
    if (auto why = binding_violation(edit, source); !why.empty()) {
        throw std::invalid_argument("edit at " + std::to_string(edit.location) + ": " + why);
    }
    const std::size_t n = source.size();
    const std::size_t removed = edit.incorrect.size();
    const std::size_t inserted = edit.correct.size();
    const std::size_t m = n - removed + inserted;
    const std::size_t loc = edit.location;
    auto corrected_at = [&](std::size_t i) {
        if (i < loc) return source[i];
        if (i < loc + inserted) return edit.correct[i - loc];
        return source[i - inserted + removed];
    };

    const std::size_t limit = std::min(n, m);
    std::size_t prefix = loc;
    while (prefix < limit && source[prefix] == corrected_at(prefix)) {
        ++prefix;
    }
    const std::size_t tail = n - loc - removed;
    std::size_t suffix = std::min(tail, limit - prefix);
    while (prefix + suffix < limit && source[n - 1 - suffix] == corrected_at(m - 1 - suffix)) {
        ++suffix;
    }

    CanonicalEdit c;
    c.location = prefix;
    c.incorrect.assign(source.substr(prefix, n - prefix - suffix));
    c.correct.reserve(m - prefix - suffix);
    for (std::size_t i = prefix; i < m - suffix; ++i) {
        c.correct.push_back(corrected_at(i));
    }
    return c;
}

CanonicalEdit canonicalize(const Passage& passage, const Edit& edit) {
    return canonicalize(passage.text, edit);
}

}  // namespace ctc
