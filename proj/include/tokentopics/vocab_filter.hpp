#pragma once

#include "tokentopics/corpus.hpp"

#include <cstdint>
#include <vector>

namespace tokentopics {

// Document-frequency thresholds applied before clustering and LDA.
struct FilterPolicy {
    double max_doc_fraction = 0.25;     // drop types in more than this fraction of documents
    std::uint64_t min_doc_count = 5;    // drop types in fewer than this many documents

    // Throws PolicyError if the thresholds are out of range or would remove
    // every type for a collection of total_docs documents.
    void validate(std::uint64_t total_docs) const;

    bool keeps(std::uint64_t doc_frequency, std::uint64_t total_docs) const {
        return doc_frequency >= min_doc_count &&
               !(static_cast<double>(doc_frequency) > max_doc_fraction * static_cast<double>(total_docs));
    }
};

struct FilterResult {
    TokenCorpus corpus;
    std::vector<bool> keep;  // indexed by type_id
    std::size_t kept_types = 0;
};

FilterResult filter_tokens(const TokenCorpus& corpus, const Vocabulary& vocab, const FilterPolicy& policy);

}  // namespace tokentopics
