#include "ctc/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace ctc {

namespace {

std::string pad(const std::string& cell, std::size_t width, bool right) {
    const std::size_t w = display_width(cell);
    const std::string fill(width > w ? width - w : 0, ' ');
    return right ? fill + cell : cell + fill;
}

// Negative when `a` ranks before `b` on score alone.
int score_order(const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (int c = compare_overall_f1(a.detection, a.correction, b.detection, b.correction); c != 0) {
        return -c;
    }
    return -compare_f1(a.detection, b.detection);
}

bool better_run(const LeaderboardEntry& a, const LeaderboardEntry& b) {
    const int c = score_order(a, b);
    return c != 0 ? c < 0 : a.best_run_id < b.best_run_id;
}

std::string full_precision(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double DatasetStats::avg_len() const noexcept {
    return n_texts == 0 ? 0.0 : static_cast<double>(total_chars) / static_cast<double>(n_texts);
}

DatasetStats compute_stats(const std::vector<Passage>& passages, const AnswerMap& gold) {
    const PassageMap by_pid = index_passages(passages);
    DatasetStats stats;
    for (CoarseType c : kAllCoarseTypes) {
        stats.per_coarse[c] = 0;
    }
    stats.n_texts = passages.size();
    for (const Passage& p : passages) {
        stats.total_chars += p.text.size();
    }
    for (const auto& [pid, annotation] : gold) {
        auto passage = by_pid.find(pid);
        if (passage == by_pid.end()) {
            throw ScoreError("no passage for gold pid " + pid);
        }
        if (!validate_annotation(annotation, passage->second).ok()) {
            throw ScoreError("gold annotation for " + pid + " does not validate");
        }
        if (!annotation.edits.empty()) {
            ++stats.n_errtext;
        }
        for (const Edit& e : annotation.edits) {
            ++stats.total_edits;
            ++stats.per_fine[e.type];
            ++stats.per_coarse[coarse_of(e.type)];
        }
    }
    return stats;
}

std::string render_stats(const DatasetStats& stats) {
    std::ostringstream out;
    char avg[32];
    std::snprintf(avg, sizeof avg, "%.2f", stats.avg_len());
    out << "#Texts\t#ErrText\tAvgLen\n" << stats.n_texts << '\t' << stats.n_errtext << '\t' << avg << "\n\n";
    out << "error type\terror number\n";
    for (CoarseType c : kAllCoarseTypes) {
        auto it = stats.per_coarse.find(c);
        out << to_string(c) << '\t' << (it == stats.per_coarse.end() ? 0 : it->second) << '\n';
    }
    out << "\nfine-grained type\terror number\n";
    for (FineType t : kAllFineTypes) {
        auto it = stats.per_fine.find(t);
        out << to_string(t) << '\t' << (it == stats.per_fine.end() ? 0 : it->second) << '\n';
    }
    out << "total edits\t" << stats.total_edits << '\n';
    return out.str();
}

std::vector<RunSubmission> parse_run_manifest(std::istream& in, const std::filesystem::path& base) {
    std::vector<RunSubmission> runs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw FormatError("expected team<TAB>run_id<TAB>path", line_no);
        }
        RunSubmission run{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)};
        if (run.team.empty() || run.run_id.empty() || run.path.empty()) {
            throw FormatError("empty manifest field", line_no);
        }
        if (run.path.is_relative() && !base.empty()) {
            run.path = base / run.path;
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

Leaderboard build_leaderboard(const std::vector<RunSubmission>& runs, const AnswerMap& gold,
                              const PassageMap& passages, std::size_t max_runs_per_team) {
    Leaderboard board;
    std::map<std::string, std::vector<const RunSubmission*>> by_team;
    for (const RunSubmission& run : runs) {
        by_team[run.team].push_back(&run);
    }

    for (auto& [team, team_runs] : by_team) {
        if (team_runs.size() > max_runs_per_team) {
            board.rejected_teams.push_back(team);
            continue;
        }
        std::sort(team_runs.begin(), team_runs.end(),
                  [](const RunSubmission* a, const RunSubmission* b) { return a->run_id < b->run_id; });
        std::optional<LeaderboardEntry> best;
        std::set<std::string> seen_ids;
        for (const RunSubmission* run : team_runs) {
            if (!seen_ids.insert(run->run_id).second) {
                board.failed.push_back({team, run->run_id, "duplicate run id"});
                continue;
            }
            AnswerMap system;
            try {
                std::ifstream in(run->path, std::ios::binary);
                if (!in) {
                    throw FormatError("cannot open " + run->path.string());
                }
                system = parse_answer_file(in);
            } catch (const std::exception& e) {
                board.failed.push_back({team, run->run_id, e.what()});
                continue;
            }
            const MatchReport report = score(gold, system, passages);
            LeaderboardEntry candidate{team, 0, run->run_id, report.detection, report.correction};
            if (!best || better_run(candidate, *best)) {
                best = std::move(candidate);
            }
        }
        if (best) {
            best->n_runs = team_runs.size();
            board.entries.push_back(*std::move(best));
        }
    }

    std::sort(board.entries.begin(), board.entries.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
        const int c = score_order(a, b);
        return c != 0 ? c < 0 : a.team < b.team;
    });
    auto by_team_then_run = [](const FailedRun& a, const FailedRun& b) {
        return std::tie(a.team, a.run_id, a.reason) < std::tie(b.team, b.run_id, b.reason);
    };
    std::sort(board.failed.begin(), board.failed.end(), by_team_then_run);
    return board;
}

std::string render_leaderboard(const Leaderboard& board) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Rank", "Team", "#Runs", "Det.Pre", "Det.Rec", "Det.F1", "Cor.Pre", "Cor.Rec", "Cor.F1",
                    "Overall F1"});
    std::size_t rank = 0;
    for (const LeaderboardEntry& e : board.entries) {
        rows.push_back({std::to_string(++rank), e.team, std::to_string(e.n_runs),
                        format_metric(e.detection.precision()), format_metric(e.detection.recall()),
                        format_metric(e.detection.f1()), format_metric(e.correction.precision()),
                        format_metric(e.correction.recall()), format_metric(e.correction.f1()),
                        format_metric(e.overall_f1())});
    }
    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], display_width(row[c]));
        }
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) {
                out << "  ";
            }
            out << pad(rows[r][c], widths[c], c != 1);
        }
        out << '\n';
    }
    for (const FailedRun& f : board.failed) {
        out << "failed run: " << f.team << " / " << f.run_id << ": " << f.reason << '\n';
    }
    for (const std::string& team : board.rejected_teams) {
        out << "rejected team (too many runs): " << team << '\n';
    }
    return out.str();
}

std::string render_leaderboard_tsv(const Leaderboard& board) {
    std::ostringstream out;
    out << "rank\tteam\tn_runs\tbest_run\tdet_tp\tdet_fp\tdet_fn\tdet_precision\tdet_recall\tdet_f1"
           "\tcorr_tp\tcorr_fp\tcorr_fn\tcorr_precision\tcorr_recall\tcorr_f1\toverall_f1\n";
    std::size_t rank = 0;
    for (const LeaderboardEntry& e : board.entries) {
        out << ++rank << '\t' << e.team << '\t' << e.n_runs << '\t' << e.best_run_id;
        for (const LevelCounts* c : {&e.detection, &e.correction}) {
            out << '\t' << c->tp << '\t' << c->fp << '\t' << c->fn << '\t' << full_precision(c->precision()) << '\t'
                << full_precision(c->recall()) << '\t' << full_precision(c->f1());
        }
        out << '\t' << full_precision(e.overall_f1()) << '\n';
    }
    return out.str();
}

}  // namespace ctc
