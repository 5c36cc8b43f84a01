#include <doctest.h>

#include <set>
#include <sstream>

#include "ctc/corruptor.hpp"
#include "ctc/edit_engine.hpp"
#include "test_support.hpp"

using namespace ctc;
using ctc::test::T;

namespace {

ConfusionResources demo_resources() {
    ConfusionResources res;
    res.pinyin_similar[T("轮")] = {T("论"), T("伦")};
    res.pinyin_similar[T("供")] = {T("工")};
    res.shape_similar[T("未")] = {T("末")};
    res.vocabulary = {T("的"), T("了"), T("是")};
    return res;
}

CorruptionConfig only(CorruptionClass c) {
    CorruptionConfig cfg;
    cfg.weights.fill(0.0);
    cfg.weights[static_cast<std::size_t>(c)] = 1.0;
    return cfg;
}

void check_record(const CorruptionRecord& r) {
    CHECK(validate_annotation(r.gold, r.corrupted).ok());
    CHECK(apply_edits(r.corrupted, r.gold) == r.original.text);
    for (const Edit& e : r.gold.edits) {
        CHECK(shape_violation(e).empty());
    }
}

}  // namespace

TEST_CASE("delete produces a missing-error gold edit") {
    const Passage p = Passage::from_utf8("d", "提更多");
    CorruptionConfig cfg = only(CorruptionClass::delete_unit);
    cfg.p_two_errors = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const CorruptionRecord r = corrupt(p, cfg, demo_resources(), rng);
        REQUIRE(r.gold.edits.size() == 1);
        const Edit& e = r.gold.edits[0];
        CHECK(e.type == FineType::missing_error);
        CHECK(e.incorrect.empty());
        CHECK(r.corrupted.text.size() == 2);
        CHECK(p.text.substr(e.location, 1) == e.correct);
        check_record(r);
    }
}

TEST_CASE("swap produces a disordered-error permutation") {
    const Passage p = Passage::from_utf8("s", "因为他们自己历史上真的就这么干了上百年");
    CorruptionConfig cfg = only(CorruptionClass::swap_adjacent);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const CorruptionRecord r = corrupt(p, cfg, demo_resources(), rng);
        for (const Edit& e : r.gold.edits) {
            CHECK(e.type == FineType::disordered_error);
            Text a = e.incorrect;
            Text b = e.correct;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
            CHECK(e.incorrect != e.correct);
        }
        check_record(r);
    }
}

TEST_CASE("replacement, insertion and fallback") {
    const Passage p = Passage::from_utf8("r", "言轮在华引发广泛声讨");
    SUBCASE("pinyin replacement uses the table") {
        CorruptionConfig cfg = only(CorruptionClass::replace_pinyin);
        cfg.p_two_errors = 0.0;
        std::size_t from_table = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            const CorruptionRecord r = corrupt(p, cfg, demo_resources(), rng);
            REQUIRE(r.ops.size() == 1);
            CHECK(r.gold.edits[0].type == FineType::character_error);
            if (!r.ops[0].fell_back) {
                ++from_table;
                CHECK(r.ops[0].original == T("轮"));
                CHECK((r.ops[0].produced == T("论") || r.ops[0].produced == T("伦")));
            } else {
                CHECK(r.ops[0].op == CorruptionClass::replace_random);
            }
            check_record(r);
        }
        CHECK(from_table > 50);
    }
    SUBCASE("no table entry anywhere falls back to random replacement") {
        CorruptionConfig cfg = only(CorruptionClass::replace_shape);
        cfg.p_two_errors = 0.0;
        Rng rng(3);
        const CorruptionRecord r = corrupt(p, cfg, demo_resources(), rng);
        CHECK(r.ops[0].fell_back);
        CHECK(r.ops[0].op == CorruptionClass::replace_random);
        check_record(r);
    }
    SUBCASE("insertion produces a redundant-error gold edit") {
        CorruptionConfig cfg = only(CorruptionClass::insert_unit);
        cfg.p_two_errors = 1.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            const CorruptionRecord r = corrupt(p, cfg, demo_resources(), rng);
            for (const Edit& e : r.gold.edits) {
                CHECK(e.type == FineType::redundant_error);
                CHECK(e.correct.empty());
            }
            CHECK(r.corrupted.text.size() == p.text.size() + r.ops.size());
            check_record(r);
        }
    }
}

TEST_CASE("too-short text") {
    CorruptionConfig cfg;
    Rng rng(1);
    CHECK_THROWS_AS(corrupt(Passage::from_utf8("x", "a"), cfg, demo_resources(), rng), CorruptionError);
}

TEST_CASE("word mode corrupts whole lexicon words") {
    ConfusionResources res = demo_resources();
    res.lexicon = {T("老百姓"), T("少数民族"), T("就业"), T("机会")};
    res.pinyin_similar[T("机会")] = {T("几会")};
    CorruptionConfig cfg = only(CorruptionClass::delete_unit);
    cfg.word_mode = true;
    cfg.p_two_errors = 0.0;
    const Passage p = Passage::from_utf8("w", "老百姓就业机会");
    std::set<Text> deleted;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const CorruptionRecord r = corrupt(p, cfg, res, rng);
        deleted.insert(r.gold.edits.at(0).correct);
        check_record(r);
    }
    CHECK(deleted == std::set<Text>{T("老百姓"), T("就业"), T("机会")});

    cfg = only(CorruptionClass::replace_pinyin);
    cfg.word_mode = true;
    cfg.p_two_errors = 0.0;
    bool saw_word_error = false;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const CorruptionRecord r = corrupt(p, cfg, res, rng);
        saw_word_error |= r.gold.edits[0].type == FineType::word_error;
        check_record(r);
    }
    CHECK(saw_word_error);
}

TEST_CASE("corrupt_corpus: inverse property, determinism, thread independence") {
    std::vector<Passage> corpus;
    std::mt19937_64 gen(5);
    const Text alphabet = U"给老百姓包括少数民族群众提供更多的就业机会一般正常人都会觉得是件好事轮未";
    for (int i = 0; i < 400; ++i) {
        Text t;
        const std::size_t n = 2 + gen() % 40;
        for (std::size_t k = 0; k < n; ++k) t.push_back(alphabet[gen() % alphabet.size()]);
        corpus.push_back(Passage{"c" + std::to_string(i), t});
    }
    CorruptionConfig cfg;
    cfg.seed = 7;
    const CorpusResult one = corrupt_corpus(corpus, cfg, demo_resources(), 1);
    const CorpusResult four = corrupt_corpus(corpus, cfg, demo_resources(), 4);
    REQUIRE(one.records.size() == four.records.size());
    CHECK(one.summary.records + one.summary.skipped == corpus.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        CHECK(one.records[i].corrupted == four.records[i].corrupted);
        CHECK(one.records[i].gold == four.records[i].gold);
        check_record(one.records[i]);
        CHECK_FALSE(one.records[i].gold.edits.empty());
    }
    std::size_t typed = 0;
    for (const auto& [t, n] : one.summary.per_type) typed += n;
    std::size_t classed = 0;
    for (const auto& [c, n] : one.summary.per_class) classed += n;
    CHECK(typed == classed);

    cfg.seed = 8;
    const CorpusResult other = corrupt_corpus(corpus, cfg, demo_resources(), 1);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        differing += one.records[i].corrupted != other.records[i].corrupted;
    }
    CHECK(differing > 0);
}

TEST_CASE("corrupt_corpus skips and tallies failures") {
    std::vector<Passage> corpus{Passage::from_utf8("a", "x"), Passage::from_utf8("b", "言轮在")};
    const CorpusResult r = corrupt_corpus(corpus, CorruptionConfig{}, demo_resources());
    CHECK(r.summary.records == 1);
    CHECK(r.summary.skipped == 1);
    REQUIRE(r.summary.failures.size() == 1);
    CHECK(r.summary.failures[0].first == "a");
    CHECK(render_summary(r.summary).find("skipped a") != std::string::npos);
}

TEST_CASE("delete-only weights yield only missing errors") {
    std::vector<Passage> corpus;
    for (int i = 0; i < 100; ++i) corpus.push_back(Passage::from_utf8("d" + std::to_string(i), "一般正常人都会觉得是件好事"));
    const CorpusResult r = corrupt_corpus(corpus, only(CorruptionClass::delete_unit), demo_resources());
    REQUIRE(r.summary.per_type.size() == 1);
    CHECK(r.summary.per_type.begin()->first == FineType::missing_error);
}

TEST_CASE("pass-through option") {
    CorruptionConfig cfg;
    cfg.pass_through = 1.0;
    Rng rng(0);
    const CorruptionRecord r = corrupt(Passage::from_utf8("p", "言轮在"), cfg, demo_resources(), rng);
    CHECK(r.gold.edits.empty());
    CHECK(r.corrupted == r.original);
}

TEST_CASE("config validation") {
    CorruptionConfig cfg;
    cfg.weights.fill(0.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CorruptionConfig{};
    cfg.p_two_errors = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CorruptionConfig{};
    cfg.weights[2] = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(CorruptionConfig{}.validate());
}

TEST_CASE("resource parsing") {
    SUBCASE("candidate lists") {
        std::istringstream in("轮\t论 伦 抡\n\n识\t示\r\n");
        const ConfusionTable t = parse_confusion_table(in);
        CHECK(t.at(T("轮")) == std::vector<Text>{T("论"), T("伦"), T("抡")});
        CHECK(t.at(T("识")) == std::vector<Text>{T("示")});
    }
    SUBCASE("empty candidate list") {
        std::istringstream in("轮\t\n");
        CHECK_THROWS_AS(parse_confusion_table(in), ResourceError);
    }
    SUBCASE("key in its own list") {
        std::istringstream in("a\tb\n轮\t论 轮\n");
        try {
            parse_confusion_table(in);
            FAIL("expected ResourceError");
        } catch (const ResourceError& e) {
            CHECK(std::string(e.what()).starts_with("line 2"));
        }
    }
    SUBCASE("missing tab") {
        std::istringstream in("轮 论\n");
        CHECK_THROWS_AS(parse_confusion_table(in), ResourceError);
    }
    SUBCASE("duplicate key: last wins with a warning") {
        std::istringstream in("轮\t论\n轮\t伦\n");
        Warnings w;
        const ConfusionTable t = parse_confusion_table(in, &w);
        CHECK(t.at(T("轮")) == std::vector<Text>{T("伦")});
        CHECK(w.size() == 1);
    }
    SUBCASE("bundled demo resources load") {
        const ConfusionResources res = load_resources({ctc::test::data_path("resources/pinyin.tsv"),
                                                       ctc::test::data_path("resources/shape.tsv"),
                                                       ctc::test::data_path("resources/vocab.txt"),
                                                       ctc::test::data_path("resources/lexicon.txt")});
        CHECK(res.pinyin_similar.at(T("轮")) == std::vector<Text>{T("论"), T("伦"), T("抡")});
        CHECK_FALSE(res.vocabulary.empty());
        CHECK_FALSE(res.lexicon.empty());
    }
    SUBCASE("empty vocabulary is rejected") {
        ConfusionResources res;
        CHECK_THROWS_AS(res.validate(), ResourceError);
    }
}

TEST_CASE("derive_seed is stable and pid-sensitive") {
    CHECK(derive_seed(7, "a") == derive_seed(7, "a"));
    CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
    CHECK(derive_seed(7, "a") != derive_seed(8, "a"));
}
