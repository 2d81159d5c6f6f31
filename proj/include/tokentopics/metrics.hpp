#pragma once

#include "tokentopics/cooccurrence.hpp"
#include "tokentopics/topic_model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tokentopics {

struct CoherenceConfig {
    std::size_t top_n = 20;
    double epsilon = 1e-12;
    std::size_t window = 25;        // reference sliding-window length
    std::size_t min_attested = 10;  // fewer attested top words -> topic skipped

    void validate() const;
};

// Conditional entropy of word types given the topic, in nats. Empty topic -> nullopt.
std::optional<double> word_entropy(const TopicSummary& topic);

// Document co-occurrence score on the working collection:
//   sum_i sum_{j<i} log((D(w_i, w_j) + eps) / D(w_j))
// over the first top_n words in rank order. Throws IntegrityError if a word has D(w) = 0.
double internal_coherence(std::span<const std::uint32_t> top_words, const CooccurrenceCounts& docs,
                          const CoherenceConfig& cfg);

// Sliding-window PMI-style score on a reference collection:
//   sum_i sum_{j<i} log((P(w_i, w_j) + eps) / (P(w_i) P(w_j)))
// over the top_n words that are attested in the reference windows.
// nullopt ("skipped") when fewer than min_attested top words are attested.
std::optional<double> external_coherence(std::span<const std::uint32_t> top_words, const CooccurrenceCounts& windows,
                                         const CoherenceConfig& cfg);

// Pr(w | z) / sum_z' Pr(w | z').
double word_exclusivity(std::span<const TopicSummary> topics, std::uint32_t topic_id, std::uint32_t type);

// Mean word exclusivity over the topic's top_n words. Empty topic -> nullopt.
std::optional<double> exclusivity(std::span<const TopicSummary> topics, std::uint32_t topic_id,
                                  const CoherenceConfig& cfg);

inline std::size_t distinct_word_count(const TopicSummary& topic) { return topic.word_counts.size(); }

struct TopicMetrics {
    std::uint32_t topic_id = 0;
    std::uint64_t tokens = 0;
    std::optional<double> entropy;
    std::optional<double> internal;
    std::optional<double> external;
    bool has_reference = false;  // external is meaningful only when true
    std::optional<double> exclusivity;
    std::size_t distinct = 0;
};

// Words every metric needs co-occurrence counts for: union of top_n lists.
std::vector<std::uint32_t> watched_words(std::span<const TopicSummary> topics, std::size_t top_n);

std::vector<TopicMetrics> evaluate_topics(std::span<const TopicSummary> topics, const CooccurrenceCounts& docs,
                                          const CooccurrenceCounts* reference, const CoherenceConfig& cfg);

// model <TAB> topic <TAB> tokens <TAB> entropy <TAB> internal <TAB> external <TAB> exclusivity <TAB> distinct
void write_metric_header(std::ostream& out);
void write_metric_rows(std::ostream& out, const std::string& model, std::span<const TopicMetrics> rows);

}  // namespace tokentopics
