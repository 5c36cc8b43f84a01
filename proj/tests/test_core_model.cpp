#include <doctest.h>

#include "ctc/core_model.hpp"
#include "ctc/edit_engine.hpp"
#include "test_support.hpp"

using namespace ctc;
using ctc::test::make_edit;
using ctc::test::T;

TEST_CASE("coarse categories follow the taxonomy table") {
    CHECK(coarse_of(FineType::character_error) == CoarseType::spelling_error);
    CHECK(coarse_of(FineType::word_error) == CoarseType::spelling_error);
    CHECK(coarse_of(FineType::missing_error) == CoarseType::grammatical_error);
    CHECK(coarse_of(FineType::redundant_error) == CoarseType::grammatical_error);
    CHECK(coarse_of(FineType::disordered_error) == CoarseType::grammatical_error);
    CHECK(coarse_of(FineType::semantic_repetition) == CoarseType::chinese_semantic_error);
    CHECK(coarse_of(FineType::syntactic_hybridity) == CoarseType::chinese_semantic_error);
}

TEST_CASE("error type labels") {
    for (FineType t : kAllFineTypes) {
        CHECK(fine_type_from_string(to_string(t)) == t);
    }
    CHECK(fine_type_from_string("  Missing   ERROR ") == FineType::missing_error);
    CHECK(fine_type_from_string("Syntactic\tHybridity") == FineType::syntactic_hybridity);
    CHECK_FALSE(fine_type_from_string("flavor error"));
    CHECK_FALSE(fine_type_from_string("missingerror"));
    CHECK(to_string(CoarseType::chinese_semantic_error) == "Chinese semantic error");
}

TEST_CASE("pid rules") {
    CHECK(is_valid_pid("0011-1"));
    CHECK(is_valid_pid("abc_9"));
    CHECK_FALSE(is_valid_pid(""));
    CHECK_FALSE(is_valid_pid("a b"));
    CHECK_FALSE(is_valid_pid("a,b"));
    CHECK_FALSE(is_valid_pid("a\tb"));
    CHECK_THROWS_AS(Passage::from_utf8("x", ""), ModelError);
    CHECK_THROWS_AS(Passage::from_utf8("x y", "text"), ModelError);
}

TEST_CASE("indexing counts characters, not bytes") {
    const auto passages = ctc::test::table5_passages();
    auto at = [&](const std::string& pid, std::size_t loc, std::string_view span) {
        const Text& text = passages.at(pid).text;
        const Text s = T(span);
        return text.substr(loc, s.size()) == s;
    };
    CHECK(at("0011-1", 20, "轮"));
    CHECK(at("0011-1", 46, "标识"));
    CHECK(at("0011-1", 8, "H"));
    CHECK(at("0011-1", 9, "M"));
    CHECK(at("0011-3", 13, "更"));  // insertion point of 供
    CHECK(at("0011-3", 26, "都都"));
    CHECK(at("0011-4", 6, "上历史"));
    CHECK(at("0023-1", 21, "的意见"));
    // The published location 29 for this span only fits 1-based counting.
    CHECK(at("0069-1", 28, "造成的"));
    CHECK_FALSE(at("0069-1", 29, "造成的"));
}

TEST_CASE("validate_annotation accepts the worked examples") {
    const auto passages = ctc::test::table5_passages();
    for (const auto& [pid, gold] : ctc::test::table5_gold()) {
        INFO(pid);
        CHECK(validate_annotation(gold, passages.at(pid)).ok());
    }
    CHECK(validate_annotation(Annotation{"0011-2", {}}, passages.at("0011-2")).ok());
}

TEST_CASE("validate_annotation reports each violation with its edit index") {
    const Passage ex1 = ctc::test::table5_passages().at("0011-1");

    SUBCASE("span mismatch") {
        Annotation a{"0011-1", {make_edit(20, FineType::character_error, "论", "轮")}};
        const auto r = validate_annotation(a, ex1);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].edit_index == 0u);
        CHECK(r.violations[0].reason == "span mismatch");
    }
    SUBCASE("pid mismatch is a violation") {
        Annotation a{"0011-9", {}};
        const auto r = validate_annotation(a, ex1);
        REQUIRE(r.violations.size() == 1);
        CHECK_FALSE(r.violations[0].edit_index);
    }
    SUBCASE("overlap and ordering") {
        Annotation a{"0011-1",
                     {make_edit(46, FineType::word_error, "标识", "表示"),
                      make_edit(47, FineType::character_error, "识", "示"),
                      make_edit(20, FineType::character_error, "轮", "论")}};
        const auto r = validate_annotation(a, ex1);
        REQUIRE(r.violations.size() == 2);
        CHECK(r.violations[0].edit_index == 1u);
        CHECK(r.violations[1].edit_index == 2u);
    }
    SUBCASE("insertion inside another span") {
        Annotation a{"0011-1",
                     {make_edit(46, FineType::word_error, "标识", "表示"),
                      make_edit(47, FineType::missing_error, "", "的")}};
        CHECK_FALSE(validate_annotation(a, ex1).ok());
    }
    SUBCASE("insertion right after a span is allowed") {
        Annotation a{"0011-1",
                     {make_edit(46, FineType::word_error, "标识", "表示"),
                      make_edit(48, FineType::missing_error, "", "的")}};
        CHECK(validate_annotation(a, ex1).ok());
    }
    SUBCASE("type shape rules") {
        CHECK_FALSE(shape_violation(make_edit(0, FineType::missing_error, "a", "b")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::redundant_error, "a", "b")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::semantic_repetition, "", "b")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::character_error, "a", "")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::disordered_error, "ab", "ab")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::disordered_error, "ab", "bc")).empty());
        CHECK(shape_violation(make_edit(0, FineType::disordered_error, "上历史", "历史上")).empty());
        CHECK_FALSE(shape_violation(make_edit(0, FineType::word_error, "", "")).empty());
    }
    SUBCASE("end insertion is the only edit allowed at len(text)") {
        const std::size_t n = ex1.text.size();
        CHECK(validate_annotation(Annotation{"0011-1", {make_edit(n, FineType::missing_error, "", "。")}}, ex1).ok());
        CHECK_FALSE(
            validate_annotation(Annotation{"0011-1", {make_edit(n, FineType::redundant_error, "：", "")}}, ex1).ok());
        CHECK_FALSE(
            validate_annotation(Annotation{"0011-1", {make_edit(n + 1, FineType::missing_error, "", "。")}}, ex1)
                .ok());
    }
}

TEST_CASE("a valid annotation always applies") {
    std::mt19937_64 rng(11);
    const Passage p = Passage::from_utf8("r", "abcabcabcabc");
    std::size_t valid = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        Annotation a{"r", {}};
        std::size_t loc = rng() % 4;
        for (int k = 0; k < 3 && loc <= p.text.size(); ++k) {
            const std::size_t len = std::min<std::size_t>(rng() % 3, p.text.size() - loc);
            Edit e{loc, FineType::word_error, p.text.substr(loc, len), len == 0 ? Text(U"x") : Text()};
            e.type = len == 0 ? FineType::missing_error : FineType::redundant_error;
            a.edits.push_back(e);
            loc += len + rng() % 3;
        }
        if (validate_annotation(a, p).ok()) {
            ++valid;
            CHECK_NOTHROW(apply_edits(p, a));
        } else {
            CHECK_THROWS_AS(apply_edits(p, a), InvalidAnnotation);
        }
    }
    CHECK(valid > 100);
}
