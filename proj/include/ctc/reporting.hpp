#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "ctc/answer_format.hpp"
#include "ctc/core_model.hpp"
#include "ctc/scorer.hpp"

namespace ctc {

struct DatasetStats {
    std::size_t n_texts = 0;
    std::size_t n_errtext = 0;
    std::size_t total_chars = 0;
    std::size_t total_edits = 0;
    std::map<CoarseType, std::size_t> per_coarse;
    std::map<FineType, std::size_t> per_fine;

    /// Mean passage length in characters; 0 for an empty corpus.
    double avg_len() const noexcept;
};

/// Passages without a gold answer count as error free. Throws ScoreError
/// when a gold pid has no passage or a gold annotation does not validate.
DatasetStats compute_stats(const std::vector<Passage>& passages, const AnswerMap& gold);

/// Texts / ErrText / AvgLen line followed by the per-type edit counts.
std::string render_stats(const DatasetStats& stats);

struct RunSubmission {
    std::string team;
    std::string run_id;
    std::filesystem::path path;
};

/// "team<TAB>run_id<TAB>path" per line. Relative paths resolve against `base`.
std::vector<RunSubmission> parse_run_manifest(std::istream& in, const std::filesystem::path& base = {});

struct LeaderboardEntry {
    std::string team;
    std::size_t n_runs = 0;
    std::string best_run_id;
    LevelCounts detection;
    LevelCounts correction;

    double overall_f1() const noexcept { return ctc::overall_f1(detection, correction); }
};

struct FailedRun {
    std::string team;
    std::string run_id;
    std::string reason;
};

struct Leaderboard {
    std::vector<LeaderboardEntry> entries;  // ranked
    std::vector<FailedRun> failed;
    std::vector<std::string> rejected_teams;  // more runs than allowed
};

/// Scores every run and keeps each team's run with the highest overall F1.
/// Ranking: overall F1, then detection F1 (both descending), then team name.
/// Within a team, ties go to the higher detection F1, then the smaller run id,
/// so submission order never matters.
Leaderboard build_leaderboard(const std::vector<RunSubmission>& runs, const AnswerMap& gold,
                              const PassageMap& passages, std::size_t max_runs_per_team = 3);

/// Aligned text table with Pre/Rec/F1 at both levels plus Overall.
std::string render_leaderboard(const Leaderboard& board);

/// Tab-separated, one header line then one line per ranked entry, full precision.
std::string render_leaderboard_tsv(const Leaderboard& board);

}  // namespace ctc
