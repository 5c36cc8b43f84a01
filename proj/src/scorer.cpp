#include "ctc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ctc {

namespace {

double ratio(std::size_t num, std::size_t den) noexcept {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct ScoredEdit {
    std::size_t index;
    CanonicalEdit canonical;
};

// Ascending canonical location; original index breaks ties.
void sort_by_location(std::vector<ScoredEdit>& edits) {
    std::stable_sort(edits.begin(), edits.end(), [](const ScoredEdit& a, const ScoredEdit& b) {
        return a.canonical.location < b.canonical.location;
    });
}

template <typename Same>
std::vector<EditPair> greedy_pairs(const std::vector<ScoredEdit>& gold, const std::vector<ScoredEdit>& system,
                                   Same same) {
    std::vector<EditPair> pairs;
    std::vector<bool> used(system.size(), false);
    for (const ScoredEdit& g : gold) {
        for (std::size_t k = 0; k < system.size(); ++k) {
            if (!used[k] && same(g.canonical, system[k].canonical)) {
                used[k] = true;
                pairs.push_back({g.index, system[k].index});
                break;
            }
        }
    }
    return pairs;
}

LevelCounts counts_from(std::size_t tp, std::size_t gold, std::size_t system) {
    return LevelCounts{tp, system - tp, gold - tp};
}

// Applies edits that bind and do not overlap, ignoring error types. Returns
// nullopt when the set cannot be applied as a whole.
std::optional<Text> apply_ignoring_types(const Text& source, const std::vector<Edit>& edits) {
    std::size_t previous_end = 0;
    std::optional<std::size_t> previous_location;
    for (const Edit& e : edits) {
        if (!binding_violation(e, source).empty()) {
            return std::nullopt;
        }
        if (previous_location && (e.location <= *previous_location || e.location < previous_end)) {
            return std::nullopt;
        }
        previous_location = e.location;
        previous_end = e.location + e.incorrect.size();
    }
    Text text = source;
    for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
        text.replace(it->location, it->incorrect.size(), it->correct);
    }
    return text;
}

std::string quote(const Text& span) { return "\"" + encode_utf8(span) + "\""; }

void append_level(std::ostringstream& out, const char* name, const LevelCounts& c) {
    out << name << "  TP=" << c.tp << " FP=" << c.fp << " FN=" << c.fn << "  P=" << format_metric(c.precision())
        << " R=" << format_metric(c.recall()) << " F1=" << format_metric(c.f1()) << '\n';
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (value.empty() || pos != value.size() || value.front() == '-') {
        throw FormatError("bad count for " + key + ": '" + value + "'");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

double LevelCounts::precision() const noexcept { return ratio(tp, tp + fp); }

double LevelCounts::recall() const noexcept { return ratio(tp, tp + fn); }

double LevelCounts::f1() const noexcept {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

LevelCounts& LevelCounts::operator+=(const LevelCounts& other) noexcept {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
}

double overall_f1(const LevelCounts& detection, const LevelCounts& correction) noexcept {
    return 0.8 * detection.f1() + 0.2 * correction.f1();
}

namespace {

__extension__ typedef unsigned __int128 Wide;

// F1 as the fraction 2tp / (2tp + fp + fn); 0/1 when there is nothing to score.
std::pair<Wide, Wide> f1_fraction(const LevelCounts& c) noexcept {
    const Wide num = Wide{2} * c.tp;
    const Wide den = num + c.fp + c.fn;
    return num == 0 ? std::pair<Wide, Wide>{0, 1} : std::pair<Wide, Wide>{num, den};
}

int compare_fractions(Wide an, Wide ad, Wide bn, Wide bd) noexcept {
    const Wide left = an * bd;
    const Wide right = bn * ad;
    return left < right ? -1 : left > right ? 1 : 0;
}

// 4/5 * F1_det + 1/5 * F1_corr, up to the common factor 1/5.
std::pair<Wide, Wide> overall_fraction(const LevelCounts& det, const LevelCounts& corr) noexcept {
    const auto [dn, dd] = f1_fraction(det);
    const auto [cn, cd] = f1_fraction(corr);
    return {Wide{4} * dn * cd + cn * dd, dd * cd};
}

}  // namespace

int compare_f1(const LevelCounts& a, const LevelCounts& b) noexcept {
    const auto [an, ad] = f1_fraction(a);
    const auto [bn, bd] = f1_fraction(b);
    return compare_fractions(an, ad, bn, bd);
}

int compare_overall_f1(const LevelCounts& det_a, const LevelCounts& corr_a, const LevelCounts& det_b,
                       const LevelCounts& corr_b) noexcept {
    const auto [an, ad] = overall_fraction(det_a, corr_a);
    const auto [bn, bd] = overall_fraction(det_b, corr_b);
    return compare_fractions(an, ad, bn, bd);
}

PassageMatch match_passage(const Passage& passage, const Annotation& gold, const Annotation& system) {
    if (gold.pid != passage.pid || system.pid != passage.pid) {
        throw ScoreError("pid mismatch: passage " + passage.pid + ", gold " + gold.pid + ", system " + system.pid);
    }
    if (auto check = validate_annotation(gold, passage); !check.ok()) {
        const Violation& v = check.violations.front();
        throw ScoreError("gold annotation for " + gold.pid + " is invalid" +
                         (v.edit_index ? " at edit " + std::to_string(*v.edit_index) : std::string()) + ": " +
                         v.reason);
    }

    PassageMatch match;
    match.pid = passage.pid;
    match.gold_edits = gold.edits.size();
    match.system_edits = system.edits.size();

    std::vector<ScoredEdit> gold_canon;
    for (std::size_t i = 0; i < gold.edits.size(); ++i) {
        gold_canon.push_back({i, canonicalize(passage.text, gold.edits[i])});
    }
    std::vector<ScoredEdit> system_canon;
    for (std::size_t i = 0; i < system.edits.size(); ++i) {
        if (auto why = binding_violation(system.edits[i], passage.text); !why.empty()) {
            match.invalid_system_edits.emplace_back(i, why);
            continue;
        }
        system_canon.push_back({i, canonicalize(passage.text, system.edits[i])});
    }
    sort_by_location(gold_canon);
    sort_by_location(system_canon);

    match.detection_pairs = greedy_pairs(gold_canon, system_canon, [](const CanonicalEdit& a, const CanonicalEdit& b) {
        return a.location == b.location && a.incorrect == b.incorrect;
    });
    match.correction_pairs = greedy_pairs(gold_canon, system_canon,
                                          [](const CanonicalEdit& a, const CanonicalEdit& b) { return a == b; });
    match.detection = counts_from(match.detection_pairs.size(), match.gold_edits, match.system_edits);
    match.correction = counts_from(match.correction_pairs.size(), match.gold_edits, match.system_edits);

    const Text gold_text = apply_edits(passage, gold);
    if (auto system_text = apply_ignoring_types(passage.text, system.edits)) {
        match.corrected_text_identical = (*system_text == gold_text);
    }
    return match;
}

MatchReport score(const AnswerMap& gold, const AnswerMap& system, const PassageMap& passages) {
    MatchReport report;
    for (const auto& [pid, gold_annotation] : gold) {
        auto passage = passages.find(pid);
        if (passage == passages.end()) {
            throw ScoreError("no passage for gold pid " + pid);
        }
        auto sys = system.find(pid);
        const Annotation none{pid, {}};
        PassageMatch m = match_passage(passage->second, gold_annotation, sys == system.end() ? none : sys->second);
        report.detection += m.detection;
        report.correction += m.correction;
        report.passages.push_back(std::move(m));
    }
    for (const auto& [pid, sys_annotation] : system) {
        if (gold.contains(pid)) {
            continue;
        }
        report.unknown_system_pids.push_back(pid);
        PassageMatch m;
        m.pid = pid;
        m.system_edits = sys_annotation.edits.size();
        m.detection.fp = m.system_edits;
        m.correction.fp = m.system_edits;
        report.detection += m.detection;
        report.correction += m.correction;
        report.passages.push_back(std::move(m));
    }
    return report;
}

std::string format_metric(double value) {
    // The nudge keeps exact ties such as 0.xxxx5 from rounding down because of
    // binary representation error.
    const double scaled = std::floor(value * 10000.0 + 0.5 + 1e-9);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", scaled / 10000.0);
    return buf;
}

std::string render_report(const MatchReport& report, bool verbose, const AnswerMap* gold, const AnswerMap* system) {
    std::ostringstream out;
    append_level(out, "Detection ", report.detection);
    append_level(out, "Correction", report.correction);
    out << "Overall F1=" << format_metric(report.overall_f1()) << '\n';
    for (const std::string& pid : report.unknown_system_pids) {
        out << "warning: system pid " << pid << " has no gold answer; its edits count as FP\n";
    }
    if (!verbose) {
        return out.str();
    }

    // Per-type detection recall over gold edits, for diagnosis only.
    std::map<FineType, std::pair<std::size_t, std::size_t>> by_type;
    out << '\n';
    for (const PassageMatch& m : report.passages) {
        out << "[" << m.pid << "] gold=" << m.gold_edits << " system=" << m.system_edits
            << " det(TP/FP/FN)=" << m.detection.tp << '/' << m.detection.fp << '/' << m.detection.fn
            << " corr(TP/FP/FN)=" << m.correction.tp << '/' << m.correction.fp << '/' << m.correction.fn;
        if (m.corrected_text_identical) {
            out << " passage-text=" << (*m.corrected_text_identical ? "identical" : "different");
        }
        out << '\n';
        const Annotation* g = nullptr;
        const Annotation* s = nullptr;
        if (gold != nullptr) {
            if (auto it = gold->find(m.pid); it != gold->end()) g = &it->second;
        }
        if (system != nullptr) {
            if (auto it = system->find(m.pid); it != system->end()) s = &it->second;
        }
        auto paired = [](const std::vector<EditPair>& pairs, std::size_t idx, bool gold_side) {
            return std::any_of(pairs.begin(), pairs.end(), [&](const EditPair& p) {
                return (gold_side ? p.gold_index : p.system_index) == idx;
            });
        };
        if (g != nullptr) {
            for (std::size_t i = 0; i < g->edits.size(); ++i) {
                const Edit& e = g->edits[i];
                const bool det = paired(m.detection_pairs, i, true);
                const bool corr = paired(m.correction_pairs, i, true);
                auto& tally = by_type[e.type];
                ++tally.second;
                tally.first += det ? 1 : 0;
                out << "  gold " << i << " " << e.location << " " << to_string(e.type) << " " << quote(e.incorrect)
                    << " -> " << quote(e.correct);
                out << (corr ? "  [detected, corrected]" : det ? "  [detected]" : "  [missed]") << '\n';
            }
        }
        if (s != nullptr) {
            for (std::size_t i = 0; i < s->edits.size(); ++i) {
                const Edit& e = s->edits[i];
                out << "  sys  " << i << " " << e.location << " " << to_string(e.type) << " " << quote(e.incorrect)
                    << " -> " << quote(e.correct);
                auto invalid = std::find_if(m.invalid_system_edits.begin(), m.invalid_system_edits.end(),
                                            [&](const auto& p) { return p.first == i; });
                if (invalid != m.invalid_system_edits.end()) {
                    out << "  [invalid: " << invalid->second << "]";
                } else if (paired(m.correction_pairs, i, false)) {
                    out << "  [TP both levels]";
                } else if (paired(m.detection_pairs, i, false)) {
                    out << "  [TP detection only]";
                } else {
                    out << "  [FP]";
                }
                out << '\n';
            }
        }
    }
    if (!by_type.empty()) {
        out << "\nDetection recall by gold error type (diagnostic, not part of the official score):\n";
        for (const auto& [type, tally] : by_type) {
            out << "  " << to_string(type) << ": " << tally.first << '/' << tally.second << '\n';
        }
    }
    return out.str();
}

std::string render_machine_report(const MatchReport& report) {
    std::ostringstream out;
    out << "format=ctc-score/1\n";
    auto level = [&](const char* name, const LevelCounts& c) {
        char buf[64];
        out << name << ".tp=" << c.tp << '\n' << name << ".fp=" << c.fp << '\n' << name << ".fn=" << c.fn << '\n';
        std::snprintf(buf, sizeof buf, "%.17g", c.precision());
        out << name << ".precision=" << buf << '\n';
        std::snprintf(buf, sizeof buf, "%.17g", c.recall());
        out << name << ".recall=" << buf << '\n';
        std::snprintf(buf, sizeof buf, "%.17g", c.f1());
        out << name << ".f1=" << buf << '\n';
    };
    level("detection", report.detection);
    level("correction", report.correction);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", report.overall_f1());
    out << "overall.f1=" << buf << '\n';
    for (const PassageMatch& m : report.passages) {
        out << "passage=" << m.pid << " gold=" << m.gold_edits << " system=" << m.system_edits
            << " det_tp=" << m.detection.tp << " det_fp=" << m.detection.fp << " det_fn=" << m.detection.fn
            << " corr_tp=" << m.correction.tp << " corr_fp=" << m.correction.fp << " corr_fn=" << m.correction.fn
            << '\n';
    }
    for (const std::string& pid : report.unknown_system_pids) {
        out << "unknown_pid=" << pid << '\n';
    }
    return out.str();
}

MatchReport parse_machine_report(std::istream& in) {
    MatchReport report;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("expected key=value", line_no);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "format") {
                if (value != "ctc-score/1") {
                    throw FormatError("unsupported report format " + value);
                }
                saw_header = true;
            } else if (key == "detection.tp") {
                report.detection.tp = parse_count(key, value);
            } else if (key == "detection.fp") {
                report.detection.fp = parse_count(key, value);
            } else if (key == "detection.fn") {
                report.detection.fn = parse_count(key, value);
            } else if (key == "correction.tp") {
                report.correction.tp = parse_count(key, value);
            } else if (key == "correction.fp") {
                report.correction.fp = parse_count(key, value);
            } else if (key == "correction.fn") {
                report.correction.fn = parse_count(key, value);
            } else if (key == "unknown_pid") {
                report.unknown_system_pids.push_back(value);
            } else if (key == "passage") {
                std::istringstream fields(value);
                PassageMatch m;
                fields >> m.pid;
                std::string field;
                while (fields >> field) {
                    const auto feq = field.find('=');
                    if (feq == std::string::npos) {
                        throw FormatError("bad passage field '" + field + "'");
                    }
                    const std::string k = field.substr(0, feq);
                    const std::size_t v = parse_count(k, field.substr(feq + 1));
                    if (k == "gold") m.gold_edits = v;
                    else if (k == "system") m.system_edits = v;
                    else if (k == "det_tp") m.detection.tp = v;
                    else if (k == "det_fp") m.detection.fp = v;
                    else if (k == "det_fn") m.detection.fn = v;
                    else if (k == "corr_tp") m.correction.tp = v;
                    else if (k == "corr_fp") m.correction.fp = v;
                    else if (k == "corr_fn") m.correction.fn = v;
                    else throw FormatError("unknown passage field '" + k + "'");
                }
                report.passages.push_back(std::move(m));
            }
            // Derived ratios are recomputed from the counts.
        } catch (const FormatError& e) {
            throw FormatError(e.detail(), line_no);
        }
    }
    if (!saw_header) {
        throw FormatError("missing format header");
    }
    return report;
}

}  // namespace ctc
