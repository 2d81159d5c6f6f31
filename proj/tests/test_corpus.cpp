#include "doctest.h"

#include "support.hpp"
#include "tokentopics/corpus.hpp"
#include "tokentopics/errors.hpp"

#include <algorithm>
#include <fstream>
#include <random>

using namespace tokentopics;
using tokentopics::testing::TempDir;

namespace {

TokenCorpus sample_corpus(std::uint32_t dim, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<float> u(-3.f, 3.f);
    TokenCorpus c(dim);
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : v) x = u(gen);
        c.push_back(static_cast<std::uint32_t>(i / 4), static_cast<std::uint32_t>(i % 4),
                    static_cast<std::uint32_t>(i % 7), v);
    }
    return c;
}

}  // namespace

TEST_CASE("empty corpus reads back as an empty stream with a valid header") {
    TempDir dir("corpus");
    write_corpus(dir / "empty.tkc", TokenCorpus(8));
    CorpusReader reader(dir / "empty.tkc");
    CHECK(reader.header().dim == 8);
    CHECK(reader.header().token_count == 0);
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("three records of dimension four round-trip bit-exactly") {
    TempDir dir("corpus");
    const auto c = sample_corpus(4, 3, 11);
    write_corpus(dir / "c.tkc", c);
    const auto back = read_corpus(dir / "c.tkc");
    REQUIRE(back.size() == 3);
    CHECK(back.dim() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.doc_ids()[i] == c.doc_ids()[i]);
        CHECK(back.word_indices()[i] == c.word_indices()[i]);
        CHECK(back.type_ids()[i] == c.type_ids()[i]);
        CHECK(std::memcmp(back.vector(i).data(), c.vector(i).data(), 16) == 0);
    }
}

TEST_CASE("header bytes follow the documented layout") {
    TempDir dir("corpus");
    TokenCorpus c(2, true);
    const float v[2] = {1.0f, -2.0f};
    c.push_back(7, 3, 5, v);
    write_corpus(dir / "c.tkc", c);
    std::ifstream in(dir / "c.tkc", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 24 + 12 + 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TKC1");
    CHECK(bytes[4] == 1);    // version
    CHECK(bytes[8] == 2);    // dim
    CHECK(bytes[12] == 1);   // token_count
    CHECK(bytes[20] == 1);   // flags: subword groups
    CHECK(bytes[24] == 7);   // doc_id
    CHECK(bytes[28] == 3);   // word_index
    CHECK(bytes[32] == 5);   // type_id
}

TEST_CASE("write-then-read is bit-exact for random payloads") {
    TempDir dir("corpus");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = sample_corpus(1 + static_cast<std::uint32_t>(seed) * 7, 50 + seed * 13, seed);
        write_corpus(dir / "c.tkc", c);
        const auto back = read_corpus(dir / "c.tkc");
        REQUIRE(back.size() == c.size());
        CHECK(std::memcmp(back.vectors().data(), c.vectors().data(), c.size() * c.dim() * sizeof(float)) == 0);
        CHECK(std::equal(back.type_ids().begin(), back.type_ids().end(), c.type_ids().begin()));
    }
}

TEST_CASE("truncation mid-record is a corruption error naming the byte offset") {
    TempDir dir("corpus");
    write_corpus(dir / "c.tkc", sample_corpus(4, 3, 2));
    const auto size = std::filesystem::file_size(dir / "c.tkc");
    std::filesystem::resize_file(dir / "c.tkc", size - 5);
    try {
        read_corpus(dir / "c.tkc");
        FAIL("expected corruption error");
    } catch (const CorruptionError& e) {
        // records are 28 bytes; the third one starts at 24 + 2 * 28
        CHECK(e.offset() == 80);
        CHECK(std::string(e.what()).find("80") != std::string::npos);
    }
}

TEST_CASE("bad magic, trailing bytes and dim mismatch are rejected") {
    TempDir dir("corpus");
    write_corpus(dir / "c.tkc", sample_corpus(4, 3, 2));
    CHECK_THROWS_AS(read_corpus(dir / "c.tkc", 5u), FormatError);

    {
        std::ofstream out(dir / "c.tkc", std::ios::binary | std::ios::app);
        out.put('x');
    }
    CHECK_THROWS_AS(read_corpus(dir / "c.tkc"), CorruptionError);

    {
        std::ofstream out(dir / "bad.tkc", std::ios::binary);
        out << "NOPE0000000000000000000000000000";
    }
    CHECK_THROWS_AS(read_corpus(dir / "bad.tkc"), FormatError);
}

TEST_CASE("word positions going backwards within a document are an ordering error") {
    TempDir dir("corpus");
    TokenCorpus c(1);
    const float v[1] = {1.0f};
    c.push_back(0, 2, 0, v);
    c.push_back(1, 0, 0, v);
    c.push_back(0, 1, 0, v);
    write_corpus(dir / "c.tkc", c);
    CHECK_THROWS_AS(read_corpus(dir / "c.tkc"), OrderingError);
}

TEST_CASE("streaming reader yields records in file order") {
    TempDir dir("corpus");
    const auto c = sample_corpus(3, 10, 4);
    write_corpus(dir / "c.tkc", c);
    CorpusReader reader(dir / "c.tkc");
    std::size_t i = 0;
    while (auto r = reader.next()) {
        CHECK(r->type_id == c.type_ids()[i]);
        CHECK(r->vector(2) == c.vector(i)[2]);
        ++i;
    }
    CHECK(i == 10);
}

TEST_CASE("merge_subwords averages each group") {
    TokenCorpus rows(2, true);
    const float a[2] = {1, 0}, b[2] = {0, 1}, s[2] = {0.25f, -4.0f};
    rows.push_back(0, 0, 3, s);
    rows.push_back(0, 1, 4, a);
    rows.push_back(0, 1, 4, b);
    const auto merged = merge_subwords(rows);
    REQUIRE(merged.size() == 2);
    CHECK_FALSE(merged.has_subword_groups());
    CHECK(merged.vector(0)[0] == 0.25f);
    CHECK(merged.vector(0)[1] == -4.0f);
    CHECK(merged.vector(1)[0] == 0.5f);
    CHECK(merged.vector(1)[1] == 0.5f);
    CHECK(merged.type_ids()[1] == 4);
}

TEST_CASE("four-subword word mean matches an independent reverse-order summation") {
    // "disillusioned" -> di / -si / -llus / -ioned
    std::mt19937_64 gen(2024);
    std::normal_distribution<float> normal(0.f, 1.f);
    const std::uint32_t dim = 768;
    TokenCorpus rows(dim, true);
    std::vector<std::vector<float>> pieces(4, std::vector<float>(dim));
    for (auto& p : pieces) {
        for (auto& x : p) x = normal(gen);
        rows.push_back(0, 0, 0, p);
    }
    const auto merged = merge_subwords(rows);
    REQUIRE(merged.size() == 1);
    for (std::uint32_t j = 0; j < dim; ++j) {
        long double acc = 0;
        for (int p = 3; p >= 0; --p) acc += pieces[p][j];
        CHECK(merged.vector(0)[j] == doctest::Approx(static_cast<double>(acc / 4)).epsilon(1e-6));
    }
}

TEST_CASE("merge_subwords properties: group count and permutation invariance") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> group_size(1, 5);
    std::normal_distribution<float> normal(0.f, 1.f);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint32_t dim = 6;
        TokenCorpus rows(dim, true), shuffled(dim, true);
        std::size_t groups = 0;
        for (std::uint32_t doc = 0; doc < 3; ++doc)
            for (std::uint32_t word = 0; word < 7; ++word) {
                std::vector<std::vector<float>> g(static_cast<std::size_t>(group_size(gen)), std::vector<float>(dim));
                for (auto& v : g)
                    for (auto& x : v) x = normal(gen);
                for (const auto& v : g) rows.push_back(doc, word, word, v);
                std::shuffle(g.begin(), g.end(), gen);
                for (const auto& v : g) shuffled.push_back(doc, word, word, v);
                ++groups;
            }
        const auto a = merge_subwords(rows);
        const auto b = merge_subwords(shuffled);
        REQUIRE(a.size() == groups);
        REQUIRE(b.size() == groups);
        CHECK((a.vectors() - b.vectors()).cwiseAbs().maxCoeff() <= 1e-6f);
    }
}

TEST_CASE("merge_subwords rejects non-contiguous groups and unflagged input") {
    TokenCorpus rows(1, true);
    const float v[1] = {1};
    rows.push_back(0, 0, 0, v);
    rows.push_back(1, 0, 1, v);
    rows.push_back(0, 0, 0, v);
    CHECK_THROWS_AS(merge_subwords(rows), OrderingError);

    TokenCorpus plain(1, false);
    plain.push_back(0, 0, 0, v);
    CHECK_THROWS_AS(merge_subwords(plain), InputError);
}

TEST_CASE("vocabulary and metadata sidecars round-trip") {
    TempDir dir("corpus");
    Vocabulary vocab(10);
    vocab.add("bank", 4, "NOUN");
    vocab.add("river", 2);
    write_vocabulary(dir / "vocab.tsv", vocab);
    const auto back = read_vocabulary(dir / "vocab.tsv", 10);
    REQUIRE(back.size() == 2);
    CHECK(back[0].surface == "bank");
    CHECK(back[0].doc_frequency == 4);
    CHECK(back[0].pos_tag == "NOUN");
    CHECK(back[1].pos_tag.empty());
    CHECK(back.find("river") == 1u);
    CHECK_NOTHROW(back.validate());

    std::vector<DocumentMeta> meta{{1, {{"year", "1999"}}}, {0, {{"year", "1980"}, {"category", "books"}}}};
    write_metadata(dir / "meta.tsv", meta);
    const auto m = read_metadata(dir / "meta.tsv");
    REQUIRE(m.size() == 2);
    CHECK(m[0].doc_id == 0);
    CHECK(m[0].labels.at("category") == "books");
    CHECK(m[1].labels.at("year") == "1999");
}

TEST_CASE("vocabulary validation and duplicate detection") {
    Vocabulary vocab(3);
    vocab.add("a", 3);
    CHECK_THROWS_AS(vocab.add("a", 1), IntegrityError);
    vocab.add("b", 4);
    CHECK_THROWS_AS(vocab.validate(), IntegrityError);
}

TEST_CASE("doc frequencies count documents, not tokens") {
    TokenCorpus c(1);
    const float v[1] = {1};
    c.push_back(0, 0, 0, v);
    c.push_back(0, 1, 0, v);
    c.push_back(1, 0, 0, v);
    c.push_back(1, 1, 1, v);
    const auto df = compute_doc_frequencies(c, 3);
    CHECK(df == std::vector<std::uint64_t>{2, 1, 0});
    CHECK_THROWS_AS(check_corpus(c, 1, 2), IntegrityError);
    CHECK_THROWS_AS(check_corpus(c, 3, 1), IntegrityError);
    CHECK_NOTHROW(check_corpus(c, 3, 2));
}
