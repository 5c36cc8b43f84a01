#include "ctc/corruptor.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ctc/edit_engine.hpp"

namespace ctc {

namespace {

constexpr int kPositionRedraws = 8;
constexpr int kPlanAttempts = 16;
constexpr int kVocabularyDraws = 8;

// Distribution helpers are written out rather than taken from <random> so the
// generated corpus is identical across standard library implementations.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = Rng::max() - Rng::max() % n;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CorruptionClass pick_class(Rng& rng, const std::array<double, kCorruptionClassCount>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double x = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        if (x < weights[i]) {
            return kAllCorruptionClasses[i];
        }
        x -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return kAllCorruptionClasses[i];
        }
    }
    return CorruptionClass::replace_random;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[uniform_below(rng, items.size())];
}

std::vector<Text> segment(const Text& text, const ConfusionResources& res, bool word_mode) {
    std::vector<Text> units;
    if (!word_mode || res.lexicon.empty()) {
        for (char32_t c : text) {
            units.emplace_back(1, c);
        }
        return units;
    }
    std::set<Text, std::less<>> lexicon(res.lexicon.begin(), res.lexicon.end());
    std::size_t longest = 0;
    for (const Text& w : res.lexicon) {
        longest = std::max(longest, w.size());
    }
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = std::min(longest, text.size() - i);
        for (; len > 1; --len) {
            if (lexicon.contains(TextView(text).substr(i, len))) {
                break;
            }
        }
        len = std::max<std::size_t>(len, 1);
        units.push_back(text.substr(i, len));
        i += len;
    }
    return units;
}

const ConfusionTable* table_for(CorruptionClass c, const ConfusionResources& res) {
    switch (c) {
        case CorruptionClass::replace_pinyin: return &res.pinyin_similar;
        case CorruptionClass::replace_shape: return &res.shape_similar;
        default: return nullptr;
    }
}

struct PlannedOp {
    CorruptionClass op;
    std::size_t position;       // drawn unit
    std::size_t first;          // first consumed unit (swap: the left one)
    std::size_t consumed;       // number of consumed units (insert: 0)
    Text payload;               // replacement or inserted item
    bool fell_back = false;
};

std::optional<PlannedOp> plan_one(Rng& rng, const std::vector<Text>& units, const CorruptionConfig& cfg,
                                  const ConfusionResources& res) {
    PlannedOp op;
    op.op = pick_class(rng, cfg.weights);
    op.position = uniform_below(rng, units.size());

    if (const ConfusionTable* table = table_for(op.op, res)) {
        bool found = table->contains(units[op.position]);
        for (int redraw = 0; !found && redraw < kPositionRedraws; ++redraw) {
            op.position = uniform_below(rng, units.size());
            found = table->contains(units[op.position]);
        }
        if (found) {
            op.payload = pick(rng, table->at(units[op.position]));
        } else {
            op.op = CorruptionClass::replace_random;
            op.fell_back = true;
        }
    }

    const Text& unit = units[op.position];
    op.first = op.position;
    op.consumed = 1;
    switch (op.op) {
        case CorruptionClass::replace_pinyin:
        case CorruptionClass::replace_shape:
            break;
        case CorruptionClass::replace_random: {
            bool ok = false;
            for (int draw = 0; !ok && draw < kVocabularyDraws; ++draw) {
                op.payload = pick(rng, res.vocabulary);
                ok = op.payload != unit;
            }
            if (!ok) {
                return std::nullopt;
            }
            break;
        }
        case CorruptionClass::delete_unit:
            break;
        case CorruptionClass::insert_unit:
            op.payload = pick(rng, res.vocabulary);
            op.consumed = 0;
            break;
        case CorruptionClass::swap_adjacent: {
            if (units.size() < 2) {
                return std::nullopt;
            }
            const std::size_t neighbour = op.position + 1 < units.size() ? op.position + 1 : op.position - 1;
            if (units[neighbour] == unit) {
                return std::nullopt;  // transposing equal units changes nothing
            }
            op.first = std::min(op.position, neighbour);
            op.consumed = 2;
            break;
        }
    }
    return op;
}

bool conflicts(const PlannedOp& a, const PlannedOp& b) {
    if (a.position == b.position) {
        return true;
    }
    auto inside = [](const PlannedOp& point, const PlannedOp& range) {
        // An insertion strictly inside a consumed range.
        return point.consumed == 0 && range.consumed > 1 && point.first > range.first &&
               point.first < range.first + range.consumed;
    };
    const bool disjoint = a.first + a.consumed <= b.first || b.first + b.consumed <= a.first;
    if (a.consumed > 0 && b.consumed > 0 && !disjoint) {
        return true;
    }
    return inside(a, b) || inside(b, a);
}

Text concat(const Text& a, const Text& b) { return a + b; }

FineType replacement_type(const Text& original, const Text& produced) {
    return original.size() == 1 && produced.size() == 1 ? FineType::character_error : FineType::word_error;
}

std::optional<CorruptionRecord> realize(const Passage& passage, const std::vector<Text>& units,
                                        std::vector<PlannedOp> plan) {
    std::sort(plan.begin(), plan.end(), [](const PlannedOp& a, const PlannedOp& b) {
        return a.first != b.first ? a.first < b.first : a.consumed < b.consumed;
    });

    std::vector<std::size_t> offsets(units.size() + 1, 0);
    for (std::size_t i = 0; i < units.size(); ++i) {
        offsets[i + 1] = offsets[i] + units[i].size();
    }

    Text out;
    CorruptionRecord record;
    std::size_t next = 0;
    for (std::size_t i = 0; i <= units.size(); ++i) {
        while (next < plan.size() && plan[next].first == i && plan[next].consumed == 0) {
            const PlannedOp& p = plan[next++];
            CorruptionOp op{p.op, p.position, offsets[i], {}, p.payload, p.fell_back,
                            Edit{out.size(), FineType::redundant_error, p.payload, {}}};
            record.ops.push_back(std::move(op));
            out += p.payload;
        }
        if (i == units.size()) {
            break;
        }
        if (next < plan.size() && plan[next].first == i) {
            const PlannedOp& p = plan[next++];
            CorruptionOp op{p.op, p.position, offsets[i], units[i], {}, p.fell_back, {}};
            switch (p.op) {
                case CorruptionClass::delete_unit:
                    op.gold = Edit{out.size(), FineType::missing_error, {}, units[i]};
                    break;
                case CorruptionClass::swap_adjacent:
                    op.original = concat(units[i], units[i + 1]);
                    op.produced = concat(units[i + 1], units[i]);
                    op.gold = Edit{out.size(), FineType::disordered_error, op.produced, op.original};
                    ++i;
                    break;
                default:
                    op.produced = p.payload;
                    op.gold = Edit{out.size(), replacement_type(units[i], p.payload), p.payload, units[i]};
                    break;
            }
            out += op.produced;
            record.ops.push_back(std::move(op));
            continue;
        }
        out += units[i];
    }

    record.original = passage;
    record.corrupted = Passage{passage.pid, std::move(out)};
    record.gold.pid = passage.pid;
    for (const CorruptionOp& op : record.ops) {
        record.gold.edits.push_back(op.gold);
    }
    if (record.corrupted.text.empty() || !validate_annotation(record.gold, record.corrupted).ok()) {
        return std::nullopt;
    }
    if (apply_edits(record.corrupted, record.gold) != passage.text) {
        throw std::logic_error("corruption of " + passage.pid + " is not inverted by its gold annotation");
    }
    return record;
}

std::optional<CorruptionRecord> try_place(const Passage& passage, const std::vector<Text>& units, std::size_t count,
                                          const CorruptionConfig& cfg, const ConfusionResources& res, Rng& rng) {
    for (int attempt = 0; attempt < kPlanAttempts; ++attempt) {
        std::vector<PlannedOp> plan;
        bool ok = true;
        for (std::size_t k = 0; k < count && ok; ++k) {
            auto op = plan_one(rng, units, cfg, res);
            ok = op.has_value() &&
                 std::none_of(plan.begin(), plan.end(), [&](const PlannedOp& other) { return conflicts(*op, other); });
            if (ok) {
                plan.push_back(*std::move(op));
            }
        }
        if (!ok) {
            continue;
        }
        if (auto record = realize(passage, units, std::move(plan))) {
            return record;
        }
    }
    return std::nullopt;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void check_table(const ConfusionTable& table, const char* name) {
    for (const auto& [key, candidates] : table) {
        if (key.empty()) {
            throw ResourceError(std::string(name) + ": empty key");
        }
        if (candidates.empty()) {
            throw ResourceError(std::string(name) + ": empty candidate list for " + encode_utf8(key));
        }
        for (const Text& c : candidates) {
            if (c.empty()) {
                throw ResourceError(std::string(name) + ": empty candidate for " + encode_utf8(key));
            }
            if (c == key) {
                throw ResourceError(std::string(name) + ": " + encode_utf8(key) + " lists itself as a candidate");
            }
        }
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

Text decode_resource(std::string_view bytes, std::size_t line_no) {
    try {
        return decode_utf8(bytes);
    } catch (const Utf8Error& e) {
        throw ResourceError(e.what(), line_no);
    }
}

template <typename Parse>
auto open_and_parse(const std::filesystem::path& path, Parse&& parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ResourceError("cannot open " + path.string());
    }
    try {
        return parse(in);
    } catch (const ResourceError& e) {
        throw ResourceError(path.string() + ": " + e.what());
    }
}

}  // namespace

std::string_view to_string(CorruptionClass c) noexcept {
    switch (c) {
        case CorruptionClass::replace_pinyin: return "replace_pinyin";
        case CorruptionClass::replace_shape: return "replace_shape";
        case CorruptionClass::replace_random: return "replace_random";
        case CorruptionClass::delete_unit: return "delete";
        case CorruptionClass::insert_unit: return "insert";
        case CorruptionClass::swap_adjacent: return "swap";
    }
    return "";
}

std::optional<CorruptionClass> corruption_class_from_string(std::string_view name) {
    for (CorruptionClass c : kAllCorruptionClasses) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

void CorruptionConfig::validate() const {
    if (!(p_two_errors >= 0.0 && p_two_errors <= 1.0)) {
        throw std::invalid_argument("p_two_errors must lie in [0, 1]");
    }
    if (!(pass_through >= 0.0 && pass_through <= 1.0)) {
        throw std::invalid_argument("pass_through must lie in [0, 1]");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("operation weights must be non-negative");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("operation weights are all zero");
    }
    if (min_text_length < 1) {
        throw std::invalid_argument("min_text_length must be at least 1");
    }
}

void ConfusionResources::validate() const {
    check_table(pinyin_similar, "pinyin table");
    check_table(shape_similar, "shape table");
    if (vocabulary.empty()) {
        throw ResourceError("vocabulary is empty");
    }
    for (const Text& item : vocabulary) {
        if (item.empty()) {
            throw ResourceError("vocabulary contains an empty item");
        }
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view pid) noexcept {
    std::uint64_t hash = 0xCBF29CE484222325ull;  // FNV-1a
    for (char c : pid) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001B3ull;
    }
    return splitmix64(seed ^ hash);
}

CorruptionRecord corrupt(const Passage& passage, const CorruptionConfig& cfg, const ConfusionResources& res,
                         Rng& rng) {
    if (passage.text.size() < cfg.min_text_length) {
        throw CorruptionError("text too short (" + std::to_string(passage.text.size()) + " < " +
                              std::to_string(cfg.min_text_length) + ")");
    }
    if (cfg.pass_through > 0.0 && uniform01(rng) < cfg.pass_through) {
        return CorruptionRecord{passage, passage, Annotation{passage.pid, {}}, {}, false};
    }
    const std::vector<Text> units = segment(passage.text, res, cfg.word_mode);
    const std::size_t wanted = uniform01(rng) < cfg.p_two_errors ? 2 : 1;

    if (auto record = try_place(passage, units, std::min(wanted, units.size()), cfg, res, rng)) {
        record->reduced = record->ops.size() < wanted;
        return *std::move(record);
    }
    if (wanted == 2) {
        if (auto record = try_place(passage, units, 1, cfg, res, rng)) {
            record->reduced = true;
            return *std::move(record);
        }
    }
    throw CorruptionError("no valid error placement found");
}

CorpusResult corrupt_corpus(std::span<const Passage> passages, const CorruptionConfig& cfg,
                            const ConfusionResources& res, unsigned threads) {
    cfg.validate();
    res.validate();

    std::vector<std::optional<CorruptionRecord>> slots(passages.size());
    std::vector<std::string> errors(passages.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(derive_seed(cfg.seed, passages[i].pid));
            try {
                slots[i] = corrupt(passages[i], cfg, res, rng);
            } catch (const CorruptionError& e) {
                errors[i] = e.what();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(passages.size())));
    if (threads <= 1) {
        work(0, passages.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (passages.size() + threads - 1) / threads;
        for (std::size_t begin = 0; begin < passages.size(); begin += chunk) {
            pool.emplace_back(work, begin, std::min(passages.size(), begin + chunk));
        }
    }

    CorpusResult result;
    CorpusSummary& s = result.summary;
    s.inputs = passages.size();
    for (std::size_t i = 0; i < passages.size(); ++i) {
        if (!slots[i]) {
            ++s.skipped;
            s.failures.emplace_back(passages[i].pid, errors[i]);
            continue;
        }
        CorruptionRecord& r = *slots[i];
        ++s.records;
        if (r.ops.empty()) {
            ++s.passed_through;
        }
        if (r.ops.size() == 2) {
            ++s.two_error_records;
        }
        if (r.reduced) {
            ++s.reduced_to_one;
        }
        for (const CorruptionOp& op : r.ops) {
            ++s.per_class[op.op];
            ++s.per_type[op.gold.type];
            if (op.fell_back) {
                ++s.fallbacks;
            }
        }
        result.records.push_back(std::move(r));
    }
    return result;
}

std::string render_summary(const CorpusSummary& s) {
    std::ostringstream out;
    out << "inputs: " << s.inputs << '\n'
        << "records: " << s.records << '\n'
        << "skipped: " << s.skipped << '\n'
        << "two-error records: " << s.two_error_records << '\n'
        << "passed through: " << s.passed_through << '\n'
        << "reduced to one error: " << s.reduced_to_one << '\n'
        << "replacement fallbacks: " << s.fallbacks << '\n'
        << "operations:\n";
    for (CorruptionClass c : kAllCorruptionClasses) {
        auto it = s.per_class.find(c);
        out << "  " << to_string(c) << ": " << (it == s.per_class.end() ? 0 : it->second) << '\n';
    }
    out << "gold error types:\n";
    for (FineType t : kAllFineTypes) {
        if (auto it = s.per_type.find(t); it != s.per_type.end()) {
            out << "  " << to_string(t) << ": " << it->second << '\n';
        }
    }
    for (const auto& [pid, why] : s.failures) {
        out << "skipped " << pid << ": " << why << '\n';
    }
    return out.str();
}

ConfusionTable parse_confusion_table(std::istream& in, Warnings* warnings) {
    ConfusionTable table;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = strip_cr(std::move(raw));
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line.erase(0, 3);
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ResourceError("expected key<TAB>candidates", line_no);
        }
        const Text key = decode_resource(std::string_view(line).substr(0, tab), line_no);
        if (key.empty()) {
            throw ResourceError("empty key", line_no);
        }
        std::vector<Text> candidates;
        std::istringstream fields(line.substr(tab + 1));
        std::string field;
        while (std::getline(fields, field, ' ')) {
            if (field.empty()) {
                continue;
            }
            Text candidate = decode_resource(field, line_no);
            if (candidate == key) {
                throw ResourceError(encode_utf8(key) + " lists itself as a candidate", line_no);
            }
            candidates.push_back(std::move(candidate));
        }
        if (candidates.empty()) {
            throw ResourceError("empty candidate list for " + encode_utf8(key), line_no);
        }
        if (table.contains(key) && warnings != nullptr) {
            warnings->push_back("line " + std::to_string(line_no) + ": duplicate key " + encode_utf8(key) +
                                " replaces the earlier entry");
        }
        table[key] = std::move(candidates);
    }
    return table;
}

std::vector<Text> parse_item_list(std::istream& in) {
    std::vector<Text> items;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = strip_cr(std::move(raw));
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line.erase(0, 3);
        }
        if (line.empty()) {
            continue;
        }
        items.push_back(decode_resource(line, line_no));
    }
    return items;
}

ConfusionResources load_resources(const ResourcePaths& paths, Warnings* warnings) {
    ConfusionResources res;
    res.pinyin_similar = open_and_parse(paths.pinyin, [&](std::istream& in) { return parse_confusion_table(in, warnings); });
    res.shape_similar = open_and_parse(paths.shape, [&](std::istream& in) { return parse_confusion_table(in, warnings); });
    res.vocabulary = open_and_parse(paths.vocabulary, [](std::istream& in) { return parse_item_list(in); });
    if (paths.lexicon) {
        res.lexicon = open_and_parse(*paths.lexicon, [](std::istream& in) { return parse_item_list(in); });
    }
    res.validate();
    return res;
}

}  // namespace ctc
