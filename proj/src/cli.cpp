#include "ctc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "ctc/answer_format.hpp"
#include "ctc/corruptor.hpp"
#include "ctc/edit_engine.hpp"
#include "ctc/reporting.hpp"
#include "ctc/scorer.hpp"

namespace ctc {

namespace {

// Raised for data problems that should end the run with kExitFailure.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Parse>
auto read_file(const std::string& path, std::ostream& err, Parse&& parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    Warnings warnings;
    try {
        auto result = parse(in, &warnings);
        for (const std::string& w : warnings) {
            err << path << ": warning: " << w << '\n';
        }
        return result;
    } catch (const FormatError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<Passage> read_passages(const std::string& path, std::ostream& err) {
    return read_file(path, err, [](std::istream& in, Warnings* w) { return parse_passage_file(in, w); });
}

AnswerMap read_answers(const std::string& path, std::ostream& err) {
    return read_file(path, err, [](std::istream& in, Warnings* w) { return parse_answer_file(in, w); });
}

std::string format_passage_lines(const std::vector<Passage>& passages) {
    std::string out;
    for (const Passage& p : passages) {
        out += serialize_passage(p);
        out += '\n';
    }
    return out;
}

struct Options {
    std::string passages;
    std::vector<std::string> answers;
    std::string gold;
    std::string system;
    std::string output;
    std::string report;
    bool verbose = false;

    // corrupt
    std::string input;
    std::string pinyin;
    std::string shape;
    std::string vocab;
    std::string lexicon;
    std::uint64_t seed = 0;
    double p_two = 0.5;
    std::vector<double> weights{1, 1, 1, 1, 1, 1};
    std::size_t min_length = 2;
    double pass_through = 0.0;
    bool word_mode = false;
    unsigned threads = 1;
    std::string out_passages;
    std::string out_answers;

    // leaderboard
    std::string manifest;
    std::size_t max_runs = 3;
    std::string tsv;
};

int do_validate(const Options& o, std::ostream& out, std::ostream& err) {
    const PassageMap passages = index_passages(read_passages(o.passages, err));
    std::size_t problems = 0;
    for (const std::string& path : o.answers) {
        const AnswerMap answers = read_answers(path, err);
        for (const auto& [pid, annotation] : answers) {
            auto p = passages.find(pid);
            if (p == passages.end()) {
                out << path << ": " << pid << ": no such passage\n";
                ++problems;
                continue;
            }
            for (const Violation& v : validate_annotation(annotation, p->second).violations) {
                out << path << ": " << pid << ": ";
                if (v.edit_index) {
                    out << "edit " << *v.edit_index << ": ";
                }
                out << v.reason << '\n';
                ++problems;
            }
        }
    }
    if (problems > 0) {
        err << problems << " violation(s)\n";
        return kExitFailure;
    }
    out << "ok\n";
    return kExitOk;
}

int do_apply(const Options& o, std::ostream& out, std::ostream& err) {
    std::vector<Passage> passages = read_passages(o.passages, err);
    const AnswerMap answers = read_answers(o.answers.front(), err);
    const PassageMap by_pid = index_passages(passages);
    for (const auto& [pid, annotation] : answers) {
        if (!by_pid.contains(pid)) {
            throw DataError("answer for unknown pid " + pid);
        }
    }
    for (Passage& p : passages) {
        auto a = answers.find(p.pid);
        if (a == answers.end()) {
            continue;
        }
        try {
            p.text = apply_edits(p, a->second);
        } catch (const InvalidAnnotation& e) {
            err << e.what() << '\n';
            return kExitFailure;
        }
        if (p.text.empty()) {
            throw DataError("correction of " + p.pid + " leaves an empty text");
        }
    }
    const std::string lines = format_passage_lines(passages);
    if (o.output.empty()) {
        out << lines;
    } else {
        write_atomic(o.output, lines);
    }
    return kExitOk;
}

int do_score(const Options& o, std::ostream& out, std::ostream& err) {
    const PassageMap passages = index_passages(read_passages(o.passages, err));
    const AnswerMap gold = read_answers(o.gold, err);
    const AnswerMap system = read_answers(o.system, err);
    const MatchReport report = score(gold, system, passages);
    out << render_report(report, o.verbose, &gold, &system);
    if (!o.report.empty()) {
        write_atomic(o.report, render_machine_report(report));
    }
    return kExitOk;
}

int do_corrupt(const Options& o, std::ostream& out, std::ostream& err) {
    CorruptionConfig cfg;
    cfg.seed = o.seed;
    cfg.p_two_errors = o.p_two;
    if (o.weights.size() != kCorruptionClassCount) {
        throw CLI::ValidationError("--weights", "expects 6 comma-separated values");
    }
    std::copy(o.weights.begin(), o.weights.end(), cfg.weights.begin());
    cfg.min_text_length = o.min_length;
    cfg.pass_through = o.pass_through;
    cfg.word_mode = o.word_mode;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("corrupt", e.what());
    }

    ResourcePaths paths{o.pinyin, o.shape, o.vocab, std::nullopt};
    if (!o.lexicon.empty()) {
        paths.lexicon = o.lexicon;
    }
    Warnings warnings;
    ConfusionResources res;
    try {
        res = load_resources(paths, &warnings);
    } catch (const ResourceError& e) {
        throw DataError(e.what());
    }
    for (const std::string& w : warnings) {
        err << "warning: " << w << '\n';
    }

    const std::vector<Passage> passages = read_passages(o.input, err);
    const CorpusResult result = corrupt_corpus(passages, cfg, res, o.threads);

    std::string passage_lines;
    std::string answer_lines;
    for (const CorruptionRecord& r : result.records) {
        passage_lines += serialize_passage(r.corrupted) + '\n';
        answer_lines += serialize_annotation(r.gold) + '\n';
    }
    // Both files are staged before either is renamed into place.
    const std::filesystem::path passages_tmp = o.out_passages + ".partial";
    const std::filesystem::path answers_tmp = o.out_answers + ".partial";
    write_atomic(passages_tmp, passage_lines);
    write_atomic(answers_tmp, answer_lines);
    std::filesystem::rename(passages_tmp, o.out_passages);
    std::filesystem::rename(answers_tmp, o.out_answers);

    out << render_summary(result.summary);
    return kExitOk;
}

int do_stats(const Options& o, std::ostream& out, std::ostream& err) {
    const std::vector<Passage> passages = read_passages(o.passages, err);
    const AnswerMap gold = o.gold.empty() ? AnswerMap{} : read_answers(o.gold, err);
    out << render_stats(compute_stats(passages, gold));
    return kExitOk;
}

int do_leaderboard(const Options& o, std::ostream& out, std::ostream& err) {
    const PassageMap passages = index_passages(read_passages(o.passages, err));
    const AnswerMap gold = read_answers(o.gold, err);
    std::ifstream manifest(o.manifest, std::ios::binary);
    if (!manifest) {
        throw DataError("cannot open " + o.manifest);
    }
    std::vector<RunSubmission> runs;
    try {
        runs = parse_run_manifest(manifest, std::filesystem::path(o.manifest).parent_path());
    } catch (const FormatError& e) {
        throw DataError(o.manifest + ": " + e.what());
    }
    const Leaderboard board = build_leaderboard(runs, gold, passages, o.max_runs);
    const std::string table = render_leaderboard(board);
    if (o.output.empty()) {
        out << table;
    } else {
        write_atomic(o.output, table);
    }
    if (!o.tsv.empty()) {
        write_atomic(o.tsv, render_leaderboard_tsv(board));
    }
    return kExitOk;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw DataError("cannot write " + tmp.string());
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw DataError("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chinese text correction toolkit: answer files, scoring, pseudo data, leaderboards", "ctc"};
    app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
    app.require_subcommand(1);

    Options o;

    auto* validate = app.add_subcommand("validate", "Check answer files against their passages");
    validate->add_option("--passages", o.passages, "Passage file")->required()->check(CLI::ExistingFile);
    validate->add_option("--answers", o.answers, "Answer file(s)")->required()->check(CLI::ExistingFile);

    auto* apply = app.add_subcommand("apply", "Apply an answer file and print the corrected passages");
    apply->add_option("--passages", o.passages, "Passage file")->required()->check(CLI::ExistingFile);
    apply->add_option("--answers", o.answers, "Answer file")->required()->expected(1)->check(CLI::ExistingFile);
    apply->add_option("-o,--output", o.output, "Write to this file instead of standard output");

    auto* score_cmd = app.add_subcommand("score", "Score a system answer file against gold");
    score_cmd->add_option("--passages", o.passages, "Passage file")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--gold", o.gold, "Gold answer file")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--system", o.system, "System answer file")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--report", o.report, "Also write a key=value report to this file");
    score_cmd->add_flag("-v,--verbose", o.verbose, "Per-edit diagnostics");

    auto* corrupt_cmd = app.add_subcommand("corrupt", "Generate pseudo training data from clean passages");
    corrupt_cmd->add_option("--input", o.input, "Clean passage file")->required()->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--pinyin", o.pinyin, "Pinyin confusion table")->required()->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--shape", o.shape, "Shape confusion table")->required()->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--vocab", o.vocab, "Vocabulary, one item per line")->required()->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--lexicon", o.lexicon, "Word lexicon for --word-mode")->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    corrupt_cmd->add_option("--p-two", o.p_two, "Probability of two errors per text")->capture_default_str();
    corrupt_cmd
        ->add_option("--weights", o.weights,
                     "Weights for replace_pinyin,replace_shape,replace_random,delete,insert,swap")
        ->delimiter(',')
        ->expected(6)
        ->capture_default_str();
    corrupt_cmd->add_option("--min-length", o.min_length, "Shortest text that is corrupted")->capture_default_str();
    corrupt_cmd->add_option("--pass-through", o.pass_through, "Fraction of texts left unchanged")
        ->capture_default_str();
    corrupt_cmd->add_flag("--word-mode", o.word_mode, "Corrupt lexicon words instead of characters");
    corrupt_cmd->add_option("--threads", o.threads, "Worker threads; output does not depend on it")
        ->capture_default_str();
    corrupt_cmd->add_option("--out-passages", o.out_passages, "Corrupted passage file")->required();
    corrupt_cmd->add_option("--out-answers", o.out_answers, "Gold answer file")->required();

    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--passages", o.passages, "Passage file")->required()->check(CLI::ExistingFile);
    stats->add_option("--gold", o.gold, "Gold answer file")->check(CLI::ExistingFile);

    auto* board = app.add_subcommand("leaderboard", "Rank teams by their best run");
    board->add_option("--passages", o.passages, "Passage file")->required()->check(CLI::ExistingFile);
    board->add_option("--gold", o.gold, "Gold answer file")->required()->check(CLI::ExistingFile);
    board->add_option("--manifest", o.manifest, "Run manifest: team<TAB>run_id<TAB>path")
        ->required()
        ->check(CLI::ExistingFile);
    board->add_option("--max-runs", o.max_runs, "Runs allowed per team")->capture_default_str();
    board->add_option("-o,--output", o.output, "Write the table to this file instead of standard output");
    board->add_option("--tsv", o.tsv, "Also write a tab-separated leaderboard");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) return do_validate(o, out, err);
        if (*apply) return do_apply(o, out, err);
        if (*score_cmd) return do_score(o, out, err);
        if (*corrupt_cmd) return do_corrupt(o, out, err);
        if (*stats) return do_stats(o, out, err);
        if (*board) return do_leaderboard(o, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace ctc
