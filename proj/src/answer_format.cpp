#include "ctc/answer_format.hpp"

#include <charconv>
#include <set>

namespace ctc {

namespace {

constexpr std::string_view kPidPrefix = "PID=";
constexpr std::string_view kBom = "\xEF\xBB\xBF";

std::string_view trim_spaces(std::string_view s) {
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    while (!s.empty() && s.back() == ' ') {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view strip_line_ending(std::string_view s) {
    if (!s.empty() && s.back() == '\n') {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.back() == '\r') {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view strip_pid_prefix(std::string_view s) {
    if (s.starts_with(kPidPrefix)) {
        s.remove_prefix(kPidPrefix.size());
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            tokens.push_back(trim_spaces(line.substr(start)));
            break;
        }
        tokens.push_back(trim_spaces(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return tokens;
}

std::size_t parse_location(std::string_view token) {
    std::size_t value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (token.empty() || ec != std::errc() || ptr != last) {
        throw FormatError("location '" + std::string(token) + "' is not a non-negative decimal integer");
    }
    return value;
}

Text decode_token(std::string_view token) {
    try {
        return decode_utf8(token);
    } catch (const Utf8Error& e) {
        throw FormatError(std::string("invalid UTF-8 in span: ") + e.what());
    }
}

void check_span_representable(const Text& span) {
    for (char32_t c : span) {
        if (c == U',' || c == U'\n' || c == U'\r') {
            throw FormatError("span '" + encode_utf8(span) + "' contains an ASCII comma or line break");
        }
    }
    if (!span.empty() && (span.front() == U' ' || span.back() == U' ')) {
        throw FormatError("span '" + encode_utf8(span) + "' has leading or trailing ASCII space");
    }
}

// Calls `fn(line_without_ending, line_number)` for every line, handling a BOM
// on the first one.
template <typename Fn>
void for_each_line(std::istream& in, Warnings* warnings, Fn&& fn) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_line_ending(raw);
        if (line_no == 1 && line.starts_with(kBom)) {
            line.remove_prefix(kBom.size());
            if (warnings != nullptr) {
                warnings->push_back("stripped UTF-8 byte order mark");
            }
        }
        fn(line, line_no);
    }
}

}  // namespace

Annotation parse_answer_line(std::string_view line) {
    line = strip_line_ending(line);
    if (!is_valid_utf8(line)) {
        throw FormatError("line is not valid UTF-8");
    }
    std::vector<std::string_view> tokens = split_commas(line);

    Annotation annotation;
    annotation.pid = std::string(strip_pid_prefix(tokens[0]));
    if (!is_valid_pid(annotation.pid)) {
        throw FormatError("invalid pid '" + annotation.pid + "'");
    }

    // Drop the single tolerated trailing empty token left by a trailing comma.
    if (tokens.size() > 1 && tokens.back().empty()) {
        tokens.pop_back();
    }
    const std::size_t rest = tokens.size() - 1;
    if (rest == 0) {
        throw FormatError("answer for " + annotation.pid + " has neither edits nor -1");
    }
    if (tokens[1] == "-1") {
        if (rest != 1) {
            throw FormatError("tokens after -1 for " + annotation.pid);
        }
        return annotation;
    }
    if (rest % 4 != 0) {
        throw FormatError("answer for " + annotation.pid + " has " + std::to_string(rest) +
                          " tokens after the pid, not a multiple of 4");
    }
    for (std::size_t i = 1; i < tokens.size(); i += 4) {
        Edit edit;
        edit.location = parse_location(tokens[i]);
        auto type = fine_type_from_string(tokens[i + 1]);
        if (!type) {
            throw FormatError("unknown error type '" + std::string(tokens[i + 1]) + "'");
        }
        edit.type = *type;
        edit.incorrect = decode_token(tokens[i + 2]);
        edit.correct = decode_token(tokens[i + 3]);
        if (edit.incorrect.empty() && edit.correct.empty()) {
            throw FormatError("edit at location " + std::to_string(edit.location) + " has both spans empty");
        }
        annotation.edits.push_back(std::move(edit));
    }
    return annotation;
}

std::string serialize_annotation(const Annotation& annotation) {
    if (!is_valid_pid(annotation.pid)) {
        throw FormatError("invalid pid '" + annotation.pid + "'");
    }
    std::string out = std::string(kPidPrefix) + annotation.pid;
    if (annotation.edits.empty()) {
        return out + ", -1";
    }
    for (const Edit& e : annotation.edits) {
        check_span_representable(e.incorrect);
        check_span_representable(e.correct);
        out += ", ";
        out += std::to_string(e.location);
        out += ", ";
        out += to_string(e.type);
        out += ", ";
        out += encode_utf8(e.incorrect);
        out += ", ";
        out += encode_utf8(e.correct);
    }
    out += ',';
    return out;
}

std::vector<Passage> parse_passage_file(std::istream& in, Warnings* warnings) {
    std::vector<Passage> passages;
    std::set<std::string, std::less<>> seen;
    for_each_line(in, warnings, [&](std::string_view line, std::size_t line_no) {
        if (trim_spaces(line).empty()) {
            return;
        }
        std::size_t sep = line.find('\t');
        if (sep == std::string_view::npos) {
            sep = line.find(' ');
        }
        if (sep == std::string_view::npos) {
            throw FormatError("no tab or space between pid and text", line_no);
        }
        std::string pid(strip_pid_prefix(line.substr(0, sep)));
        if (!is_valid_pid(pid)) {
            throw FormatError("invalid pid '" + pid + "'", line_no);
        }
        if (seen.contains(pid)) {
            throw FormatError("duplicate pid " + pid, line_no);
        }
        Text text;
        try {
            text = decode_utf8(line.substr(sep + 1));
        } catch (const Utf8Error& e) {
            throw FormatError(e.what(), line_no);
        }
        if (text.empty()) {
            throw FormatError("empty text for pid " + pid, line_no);
        }
        seen.insert(pid);
        passages.push_back(Passage{std::move(pid), std::move(text)});
    });
    return passages;
}

AnswerMap parse_answer_file(std::istream& in, Warnings* warnings) {
    AnswerMap answers;
    for_each_line(in, warnings, [&](std::string_view line, std::size_t line_no) {
        if (trim_spaces(line).empty()) {
            return;
        }
        Annotation a;
        try {
            a = parse_answer_line(line);
        } catch (const FormatError& e) {
            throw FormatError(e.detail(), line_no);
        }
        if (answers.contains(a.pid)) {
            throw FormatError("duplicate pid " + a.pid, line_no);
        }
        std::string pid = a.pid;
        answers.emplace(std::move(pid), std::move(a));
    });
    return answers;
}

std::string serialize_passage(const Passage& passage) {
    return std::string(kPidPrefix) + passage.pid + "\t" + encode_utf8(passage.text);
}

PassageMap index_passages(const std::vector<Passage>& passages) {
    PassageMap map;
    for (const Passage& p : passages) {
        if (!map.emplace(p.pid, p).second) {
            throw FormatError("duplicate pid " + p.pid);
        }
    }
    return map;
}

}  // namespace ctc
