#include "tokentopics/cooccurrence.hpp"

#include "tokentopics/errors.hpp"
#include "tokentopics/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tokentopics {

TokenizedDocuments documents_of(const TokenCorpus& corpus) {
    TokenizedDocuments docs(corpus.document_count());
    for (std::size_t i = 0; i < corpus.size(); ++i) docs[corpus.doc_ids()[i]].push_back(corpus.type_ids()[i]);
    return docs;
}

TokenizedDocuments read_reference_corpus(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reference corpus " + path.string());
    TokenizedDocuments docs;
    std::string line, token;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream words(line);
        std::vector<std::uint32_t> doc;
        while (words >> token) doc.push_back(vocab.find(token).value_or(kOutOfVocabulary));
        if (!doc.empty()) docs.push_back(std::move(doc));
    }
    return docs;
}

std::uint64_t CooccurrenceCounts::count(std::uint32_t w) const {
    auto it = single_.find(w);
    return it == single_.end() ? 0 : it->second;
}

std::uint64_t CooccurrenceCounts::pair_count(std::uint32_t a, std::uint32_t b) const {
    if (a == b) return count(a);
    auto it = pair_.find(detail::pair_key(a, b));
    return it == pair_.end() ? 0 : it->second;
}

void CooccurrenceCounts::add_unit(std::vector<std::uint32_t>& present) {
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    ++units_;
    for (std::size_t i = 0; i < present.size(); ++i) {
        ++single_[present[i]];
        for (std::size_t j = 0; j < i; ++j) ++pair_[detail::pair_key(present[j], present[i])];
    }
}

void CooccurrenceCounts::merge(const CooccurrenceCounts& other) {
    units_ += other.units_;
    for (const auto& [k, v] : other.single_) single_[k] += v;
    for (const auto& [k, v] : other.pair_) pair_[k] += v;
}

namespace {

template <typename PerDocument>
CooccurrenceCounts build(const TokenizedDocuments& docs, std::span<const std::uint32_t> watched, unsigned threads,
                         PerDocument&& per_document) {
    constexpr std::size_t kDocsPerChunk = 64;
    std::unordered_set<std::uint32_t> watch(watched.begin(), watched.end());
    std::vector<CooccurrenceCounts> partial(chunk_count(docs.size(), kDocsPerChunk));
    parallel_chunks(
        docs.size(), threads,
        [&](std::size_t c, std::size_t b, std::size_t e) {
            std::vector<std::uint32_t> present;
            for (std::size_t d = b; d < e; ++d) per_document(docs[d], watch, partial[c], present);
        },
        kDocsPerChunk);
    CooccurrenceCounts out;
    for (const auto& p : partial) out.merge(p);
    return out;
}

}  // namespace

CooccurrenceCounts CooccurrenceCounts::documents(const TokenizedDocuments& docs,
                                                 std::span<const std::uint32_t> watched, unsigned threads) {
    auto out = build(docs, watched, threads,
                     [](const auto& doc, const auto& watch, CooccurrenceCounts& acc, auto& present) {
                         present.clear();
                         for (auto w : doc)
                             if (watch.contains(w)) present.push_back(w);
                         acc.add_unit(present);
                     });
    out.watched_.insert(watched.begin(), watched.end());
    return out;
}

CooccurrenceCounts CooccurrenceCounts::windows(const TokenizedDocuments& docs, std::span<const std::uint32_t> watched,
                                               std::size_t window, unsigned threads) {
    if (window < 2) throw ConfigError("sliding window must span at least 2 tokens");
    auto out = build(docs, watched, threads,
                     [window](const auto& doc, const auto& watch, CooccurrenceCounts& acc, auto& present) {
                         const std::size_t starts = doc.size() < window ? 1 : doc.size() - window + 1;
                         for (std::size_t s = 0; s < starts; ++s) {
                             present.clear();
                             const std::size_t end = std::min(doc.size(), s + window);
                             for (std::size_t i = s; i < end; ++i)
                                 if (watch.contains(doc[i])) present.push_back(doc[i]);
                             acc.add_unit(present);
                         }
                     });
    out.watched_.insert(watched.begin(), watched.end());
    return out;
}

}  // namespace tokentopics
