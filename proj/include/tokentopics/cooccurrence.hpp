#pragma once

#include "tokentopics/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tokentopics {

inline constexpr std::uint32_t kOutOfVocabulary = std::numeric_limits<std::uint32_t>::max();

// Documents as sequences of type ids; tokens absent from the vocabulary are kOutOfVocabulary.
using TokenizedDocuments = std::vector<std::vector<std::uint32_t>>;

// Groups a token stream by doc_id (documents without tokens come back empty).
TokenizedDocuments documents_of(const TokenCorpus& corpus);

// Plain text, one document per line, space-separated tokens, mapped through `vocab`.
// Blank lines are skipped.
TokenizedDocuments read_reference_corpus(const std::filesystem::path& path, const Vocabulary& vocab);

namespace detail {
inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}
}  // namespace detail

// Counts of units (documents or windows) containing a word or a word pair,
// restricted to a watched set of types. Pair counts are symmetric.
class CooccurrenceCounts {
public:
    std::uint64_t units() const { return units_; }
    std::uint64_t count(std::uint32_t w) const;
    std::uint64_t pair_count(std::uint32_t a, std::uint32_t b) const;
    bool watches(std::uint32_t w) const { return watched_.contains(w); }

    // D(w) and D(w_i, w_j) over documents of the working collection.
    static CooccurrenceCounts documents(const TokenizedDocuments& docs, std::span<const std::uint32_t> watched,
                                        unsigned threads = 1);

    // Sliding windows of `window` tokens, stride 1, per document. A document
    // shorter than the window contributes exactly one window, so the window
    // total is sum over documents of max(1, len - window + 1).
    static CooccurrenceCounts windows(const TokenizedDocuments& docs, std::span<const std::uint32_t> watched,
                                      std::size_t window, unsigned threads = 1);

    // Counts one unit whose watched types are `present` (deduplicated in place).
    void add_unit(std::vector<std::uint32_t>& present);
    void merge(const CooccurrenceCounts& other);

private:
    std::unordered_set<std::uint32_t> watched_;
    std::unordered_map<std::uint32_t, std::uint64_t> single_;
    std::unordered_map<std::uint64_t, std::uint64_t> pair_;
    std::uint64_t units_ = 0;
};

}  // namespace tokentopics
