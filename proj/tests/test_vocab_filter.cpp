#include "doctest.h"

#include "tokentopics/errors.hpp"
#include "tokentopics/vocab_filter.hpp"

#include <map>
#include <random>

using namespace tokentopics;

namespace {

Vocabulary vocab_with(std::uint64_t total_docs, std::initializer_list<std::uint64_t> dfs) {
    Vocabulary v(total_docs);
    int i = 0;
    for (auto df : dfs) v.add("w" + std::to_string(i++), df);
    return v;
}

}  // namespace

TEST_CASE("document-fraction threshold is strict") {
    const FilterPolicy policy;
    CHECK_FALSE(policy.keeps(26, 100));  // 26% > 25%
    CHECK(policy.keeps(25, 100));        // exactly 25% stays
    CHECK_FALSE(policy.keeps(4, 100));   // fewer than five documents
    CHECK(policy.keeps(5, 100));
}

TEST_CASE("filter_tokens drops tokens of removed types and preserves order") {
    auto vocab = vocab_with(100, {26, 25, 4, 5});
    TokenCorpus c(1);
    const float v[1] = {0.5f};
    const std::uint32_t types[] = {0, 1, 2, 3, 1, 0, 3};
    for (std::uint32_t i = 0; i < 7; ++i) c.push_back(i, 0, types[i], v);

    const auto r = filter_tokens(c, vocab, FilterPolicy{});
    CHECK(r.keep == std::vector<bool>{false, true, false, true});
    CHECK(r.kept_types == 2);
    REQUIRE(r.corpus.size() == 4);
    CHECK(std::vector<std::uint32_t>(r.corpus.type_ids().begin(), r.corpus.type_ids().end()) ==
          std::vector<std::uint32_t>{1, 3, 1, 3});
    CHECK(std::vector<std::uint32_t>(r.corpus.doc_ids().begin(), r.corpus.doc_ids().end()) ==
          std::vector<std::uint32_t>{1, 3, 4, 6});
}

TEST_CASE("degenerate policies are rejected") {
    auto vocab = vocab_with(10, {1, 2});
    TokenCorpus c(1);
    // 5 > 0.25 * 10: every type removed by construction
    CHECK_THROWS_AS(filter_tokens(c, vocab, FilterPolicy{}), PolicyError);
    CHECK_THROWS_AS(FilterPolicy({0.0, 1}).validate(100), PolicyError);
    CHECK_THROWS_AS(FilterPolicy({1.5, 1}).validate(100), PolicyError);
    CHECK_THROWS_AS(FilterPolicy({0.5, 0}).validate(100), PolicyError);

    // non-degenerate thresholds but nothing survives
    auto rare = vocab_with(100, {1, 2});
    try {
        filter_tokens(c, rare, FilterPolicy{});
        FAIL("expected policy error");
    } catch (const PolicyError& e) {
        CHECK(std::string(e.what()).find("min_doc_count=5") != std::string::npos);
    }
}

TEST_CASE("filtering is idempotent and conserves surviving token counts") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint32_t docs = 40, types = 30;
        std::uniform_int_distribution<std::uint32_t> pick(0, types - 1);
        std::uniform_int_distribution<int> len(1, 30);
        TokenCorpus c(1);
        const float v[1] = {1};
        for (std::uint32_t d = 0; d < docs; ++d) {
            const int n = len(gen);
            for (int i = 0; i < n; ++i) c.push_back(d, static_cast<std::uint32_t>(i), pick(gen) % (1 + trial + d % 20), v);
        }
        Vocabulary vocab(docs);
        for (std::uint32_t t = 0; t < types; ++t) vocab.add("t" + std::to_string(t));
        vocab.set_doc_frequencies(compute_doc_frequencies(c, types));

        FilterPolicy policy{0.5, 3};
        const auto once = filter_tokens(c, vocab, policy);

        // independent counter: tokens per kept type
        std::map<std::uint32_t, std::size_t> tokens_of;
        for (auto t : c.type_ids()) ++tokens_of[t];
        std::size_t expected = 0;
        for (std::uint32_t t = 0; t < types; ++t) {
            const auto df = vocab[t].doc_frequency;
            if (df >= 3 && static_cast<double>(df) <= 0.5 * docs) expected += tokens_of[t];
        }
        CHECK(once.corpus.size() == expected);

        const auto twice = filter_tokens(once.corpus, vocab, policy);
        CHECK(twice.corpus.size() == once.corpus.size());
        CHECK(std::equal(twice.corpus.type_ids().begin(), twice.corpus.type_ids().end(),
                         once.corpus.type_ids().begin()));
    }
}
