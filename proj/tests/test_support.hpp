#pragma once

#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ctc/answer_format.hpp"
#include "ctc/core_model.hpp"

namespace ctc::test {

inline Text T(std::string_view utf8) { return decode_utf8(utf8); }

inline std::string data_path(const std::string& rel) { return std::string(CTC_DATA_DIR) + "/" + rel; }

inline std::vector<Passage> load_passages(const std::string& rel) {
    std::ifstream in(data_path(rel), std::ios::binary);
    return parse_passage_file(in);
}

inline AnswerMap load_answers(const std::string& rel) {
    std::ifstream in(data_path(rel), std::ios::binary);
    return parse_answer_file(in);
}

inline PassageMap table5_passages() { return index_passages(load_passages("fixtures/table5/passages.txt")); }
inline AnswerMap table5_gold() { return load_answers("fixtures/table5/gold.txt"); }
inline AnswerMap table5_system() { return load_answers("fixtures/table5/system.txt"); }

inline Edit make_edit(std::size_t loc, FineType type, std::string_view incorrect, std::string_view correct) {
    return Edit{loc, type, T(incorrect), T(correct)};
}

// Random span drawn from a mixed alphabet: CJK, full-width punctuation,
// Latin, and an interior ASCII space. Never contains an ASCII comma.
inline Text random_span(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
    static const Text alphabet = U"轮论标识表示都供上历史的意见造成，。；HMab1 ";
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    Text out;
    const std::size_t n = len_dist(rng);
    while (out.size() < n) {
        char32_t c = alphabet[pick(rng)];
        if (c == U' ' && (out.empty() || out.size() + 1 == n)) {
            continue;  // spans are trimmed on parse, so no edge spaces
        }
        out.push_back(c);
    }
    return out;
}

/// Random annotation that satisfies every model invariant (without a bound
/// passage, locations are only required to ascend and not overlap).
inline Annotation random_annotation(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_edits(0, 5);
    std::uniform_int_distribution<int> type_pick(0, 6);
    std::uniform_int_distribution<std::size_t> gap(0, 20);
    Annotation a;
    a.pid = "p" + std::to_string(rng() % 100000) + "-" + std::to_string(rng() % 10);
    std::size_t next_free = 0;
    const int n = n_edits(rng);
    for (int i = 0; i < n; ++i) {
        Edit e;
        e.type = kAllFineTypes[type_pick(rng)];
        e.location = next_free + gap(rng) + (i > 0 ? 1 : 0);
        switch (e.type) {
            case FineType::missing_error:
                e.correct = random_span(rng, 1, 4);
                break;
            case FineType::redundant_error:
            case FineType::semantic_repetition:
            case FineType::syntactic_hybridity:
                e.incorrect = random_span(rng, 1, 4);
                break;
            case FineType::character_error:
            case FineType::word_error:
                e.incorrect = random_span(rng, 1, 4);
                do {
                    e.correct = random_span(rng, 1, 4);
                } while (e.correct == e.incorrect);
                break;
            case FineType::disordered_error:
                do {
                    e.incorrect = random_span(rng, 2, 4);
                    e.correct = e.incorrect;
                    std::shuffle(e.correct.begin(), e.correct.end(), rng);
                } while (e.correct == e.incorrect || e.correct.front() == U' ' || e.correct.back() == U' ');
                break;
        }
        next_free = e.location + e.incorrect.size();
        a.edits.push_back(std::move(e));
    }
    return a;
}

}  // namespace ctc::test
