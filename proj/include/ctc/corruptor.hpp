#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctc/answer_format.hpp"
#include "ctc/core_model.hpp"

namespace ctc {

// Pseudo training data: clean text in, corrupted text plus the gold
// annotation that restores it out.

using ConfusionTable = std::map<Text, std::vector<Text>>;

struct ConfusionResources {
    ConfusionTable pinyin_similar;
    ConfusionTable shape_similar;
    std::vector<Text> vocabulary;
    /// Word-mode segmentation lexicon. Unused in character mode.
    std::vector<Text> lexicon;

    /// Throws ResourceError when an invariant does not hold.
    void validate() const;
};

enum class CorruptionClass {
    replace_pinyin,
    replace_shape,
    replace_random,
    delete_unit,
    insert_unit,
    swap_adjacent,
};

inline constexpr std::size_t kCorruptionClassCount = 6;

inline constexpr std::array<CorruptionClass, kCorruptionClassCount> kAllCorruptionClasses = {
    CorruptionClass::replace_pinyin, CorruptionClass::replace_shape, CorruptionClass::replace_random,
    CorruptionClass::delete_unit,    CorruptionClass::insert_unit,   CorruptionClass::swap_adjacent,
};

std::string_view to_string(CorruptionClass c) noexcept;
std::optional<CorruptionClass> corruption_class_from_string(std::string_view name);

struct CorruptionConfig {
    std::uint64_t seed = 0;
    double p_two_errors = 0.5;
    /// Indexed by CorruptionClass.
    std::array<double, kCorruptionClassCount> weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    std::size_t min_text_length = 2;
    /// Fraction of passages emitted unchanged with a "-1" answer.
    double pass_through = 0.0;
    /// Corrupt lexicon words (greedy longest match) instead of single characters.
    bool word_mode = false;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct CorruptionOp {
    CorruptionClass op = CorruptionClass::replace_random;
    std::size_t unit_index = 0;   // position drawn in the segmented original
    std::size_t char_offset = 0;  // character offset of that unit in the original
    Text original;                // span of the original text affected
    Text produced;                // what replaced it in the corrupted text
    bool fell_back = false;       // confusion class had no entry; replaced at random
    Edit gold;                    // inverse edit, located in the corrupted text
};

struct CorruptionRecord {
    Passage original;
    Passage corrupted;
    Annotation gold;
    std::vector<CorruptionOp> ops;
    /// Two errors were drawn but only one could be placed.
    bool reduced = false;
};

class CorruptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what) {}
};

using Rng = std::mt19937_64;

/// Per-passage generator seed: a mix of the run seed and a stable hash of the pid.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view pid) noexcept;

/// Injects one or two errors into `passage`. Throws CorruptionError when the
/// text is shorter than cfg.min_text_length or no valid placement exists.
CorruptionRecord corrupt(const Passage& passage, const CorruptionConfig& cfg, const ConfusionResources& res,
                         Rng& rng);

struct CorpusSummary {
    std::size_t inputs = 0;
    std::size_t records = 0;
    std::size_t skipped = 0;
    std::size_t two_error_records = 0;
    std::size_t passed_through = 0;
    std::size_t fallbacks = 0;
    std::size_t reduced_to_one = 0;
    std::map<CorruptionClass, std::size_t> per_class;
    std::map<FineType, std::size_t> per_type;
    std::vector<std::pair<std::string, std::string>> failures;  // pid, reason
};

struct CorpusResult {
    std::vector<CorruptionRecord> records;
    CorpusSummary summary;
};

/// One record per eligible passage, in input order. Each passage draws from
/// its own generator seeded by derive_seed, so `threads` never changes the
/// result. Per-passage failures are tallied in the summary.
CorpusResult corrupt_corpus(std::span<const Passage> passages, const CorruptionConfig& cfg,
                            const ConfusionResources& res, unsigned threads = 1);

std::string render_summary(const CorpusSummary& summary);

/// "key<TAB>cand1 cand2 ..." per line. A repeated key replaces the earlier
/// entry and adds a warning.
ConfusionTable parse_confusion_table(std::istream& in, Warnings* warnings = nullptr);

/// One item per line; blank lines are skipped.
std::vector<Text> parse_item_list(std::istream& in);

struct ResourcePaths {
    std::filesystem::path pinyin;
    std::filesystem::path shape;
    std::filesystem::path vocabulary;
    std::optional<std::filesystem::path> lexicon;
};

ConfusionResources load_resources(const ResourcePaths& paths, Warnings* warnings = nullptr);

}  // namespace ctc
