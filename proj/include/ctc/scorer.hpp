#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctc/answer_format.hpp"
#include "ctc/core_model.hpp"
#include "ctc/edit_engine.hpp"

namespace ctc {

/// Edit-level confusion counts for one evaluation level. Ratios follow the
/// 0/0 = 0 convention.
struct LevelCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const noexcept;
    double recall() const noexcept;
    double f1() const noexcept;

    LevelCounts& operator+=(const LevelCounts& other) noexcept;
    friend bool operator==(const LevelCounts&, const LevelCounts&) = default;
};

/// 0.8 * detection F1 + 0.2 * correction F1.
double overall_f1(const LevelCounts& detection, const LevelCounts& correction) noexcept;

/// Exact three-way comparisons on the underlying rationals (-1, 0, 1), so
/// equal scores compare equal regardless of floating-point rounding.
int compare_f1(const LevelCounts& a, const LevelCounts& b) noexcept;
int compare_overall_f1(const LevelCounts& det_a, const LevelCounts& corr_a, const LevelCounts& det_b,
                       const LevelCounts& corr_b) noexcept;

struct EditPair {
    std::size_t gold_index;
    std::size_t system_index;

    friend bool operator==(const EditPair&, const EditPair&) = default;
};

struct PassageMatch {
    std::string pid;
    std::size_t gold_edits = 0;
    std::size_t system_edits = 0;
    LevelCounts detection;
    LevelCounts correction;
    std::vector<EditPair> detection_pairs;
    std::vector<EditPair> correction_pairs;
    /// System edits that do not bind to the passage; each is an FP at both levels.
    std::vector<std::pair<std::size_t, std::string>> invalid_system_edits;
    /// Diagnostic only: the whole system annotation reproduces the gold
    /// corrected passage. Never affects the counts. Unset when either side
    /// cannot be applied as a whole.
    std::optional<bool> corrected_text_identical;
};

struct MatchReport {
    LevelCounts detection;
    LevelCounts correction;
    std::vector<PassageMatch> passages;
    /// System pids with no gold answer; all their edits count as FP.
    std::vector<std::string> unknown_system_pids;

    double overall_f1() const noexcept { return ctc::overall_f1(detection, correction); }
};

class ScoreError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Canonicalizes both sides and pairs edits one-to-one, greedily in ascending
/// canonical location order. Detection compares (location, incorrect) of the
/// canonical forms; correction compares the full canonical edit. Error types
/// are ignored. Throws ScoreError on a pid mismatch or an invalid gold edit.
PassageMatch match_passage(const Passage& passage, const Annotation& gold, const Annotation& system);

/// A gold pid missing from `system` is scored as "-1". Throws ScoreError when
/// a gold pid has no passage.
MatchReport score(const AnswerMap& gold, const AnswerMap& system, const PassageMap& passages);

/// Half-up rounding to four decimals, e.g. "0.4667".
std::string format_metric(double value);

/// Human-readable summary. Verbose mode appends per-edit diagnostics.
std::string render_report(const MatchReport& report, bool verbose = false,
                          const AnswerMap* gold = nullptr, const AnswerMap* system = nullptr);

/// Line-oriented key=value form; the format is described in README.md.
std::string render_machine_report(const MatchReport& report);

/// Reads the aggregate and per-passage counts back from render_machine_report
/// output. Pair listings and diagnostics are not part of the round trip.
MatchReport parse_machine_report(std::istream& in);

}  // namespace ctc
