#pragma once

#include "tokentopics/corpus.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace tokentopics {

struct TopicSummary {
    std::uint32_t topic_id = 0;
    std::map<std::uint32_t, std::uint64_t> word_counts;  // type_id -> tokens
    std::map<std::uint32_t, double> word_dist;           // Pr(w | z), unsmoothed
    std::vector<std::pair<std::uint32_t, std::uint64_t>> top_words;
    std::uint64_t total_tokens = 0;

    bool empty() const { return total_tokens == 0; }
    double probability(std::uint32_t type) const {
        auto it = word_dist.find(type);
        return it == word_dist.end() ? 0.0 : it->second;
    }
    std::vector<std::uint32_t> top_word_ids(std::size_t n = SIZE_MAX) const;
};

// Ranks types by count, descending; ties by ascending type_id.
std::vector<std::pair<std::uint32_t, std::uint64_t>> rank_words(const std::map<std::uint32_t, std::uint64_t>& counts,
                                                                 std::size_t top_n);

std::vector<TopicSummary> summarize(std::span<const std::uint32_t> assignments,
                                    std::span<const std::uint32_t> type_ids, std::uint32_t num_topics,
                                    std::size_t top_n = 20);

inline std::vector<TopicSummary> summarize(std::span<const std::uint32_t> assignments, const TokenCorpus& corpus,
                                           std::uint32_t num_topics, std::size_t top_n = 20) {
    return summarize(assignments, corpus.type_ids(), num_topics, top_n);
}

struct DocTopicRow {
    std::uint32_t doc_id = 0;
    std::uint64_t tokens = 0;
    Eigen::VectorXd proportions;  // zero for documents without tokens
};

// One row per doc_id in [0, num_docs).
std::vector<DocTopicRow> doc_topic_matrix(std::span<const std::uint32_t> assignments,
                                          std::span<const std::uint32_t> doc_ids, std::uint32_t num_topics,
                                          std::uint32_t num_docs);

// topic <TAB> tokens <TAB> distinct <TAB> space-separated word:count list
void write_topic_summaries(std::ostream& out, std::span<const TopicSummary> topics, const Vocabulary& vocab);
// doc_id <TAB> tokens <TAB> p_0 ... p_{K-1}
void write_doc_topics(std::ostream& out, std::span<const DocTopicRow> rows);

}  // namespace tokentopics
