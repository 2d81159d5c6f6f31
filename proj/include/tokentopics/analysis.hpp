#pragma once

#include "tokentopics/corpus.hpp"
#include "tokentopics/topic_model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tokentopics {

using CountMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Topic x label token counts under one metadata partition scheme.
struct PartitionTable {
    std::string scheme;
    std::vector<std::string> labels;  // numeric order when every label is a number, else lexicographic
    CountMatrix counts;               // K x labels

    std::uint64_t topic_total(Eigen::Index z) const { return counts.row(z).sum(); }
    std::uint64_t label_total(Eigen::Index l) const { return counts.col(l).sum(); }
    std::uint64_t total() const { return counts.sum(); }
};

PartitionTable partition_prevalence(std::span<const std::uint32_t> assignments,
                                    std::span<const std::uint32_t> doc_ids, std::span<const DocumentMeta> meta,
                                    const std::string& scheme, std::uint32_t num_topics);

// Topics with the most tokens under label column `label`, ties by topic id.
std::vector<std::pair<std::uint32_t, std::uint64_t>> prominent_topics(const PartitionTable& table,
                                                                      Eigen::Index label, std::size_t top_m);

struct RankedTopic {
    std::uint32_t topic_id = 0;
    double score = 0.0;
};

// Topics ordered by descending entropy (nats) of their distribution over labels.
std::vector<RankedTopic> uniform_topics(const PartitionTable& table, std::size_t top_m);

enum class SeriesNormalization { none, per_label };

struct TimeSeries {
    std::vector<std::string> labels;     // ascending
    Eigen::MatrixXd series;              // K x T
    std::vector<RankedTopic> order;      // by mean position over the ordered labels, ascending
};

// Requires numeric labels (e.g. years); throws InputError otherwise.
TimeSeries time_series(const PartitionTable& table, SeriesNormalization normalize);

// Eight-level block rendering of a row scaled to its maximum.
std::string sparkline(const Eigen::Ref<const Eigen::VectorXd>& values);

// Base-e Jensen-Shannon divergence, in [0, log 2].
double jensen_shannon(const std::map<std::uint32_t, double>& p, const std::map<std::uint32_t, double>& q);

struct PolysemyCandidate {
    std::uint32_t type_id = 0;
    std::uint32_t topic_a = 0;
    std::uint32_t topic_b = 0;
    double jsd = 0.0;
};

// Types in the top_n of at least two topics, ranked by their largest pairwise
// JSD between those topics' word distributions.
std::vector<PolysemyCandidate> polysemy_candidates(std::span<const TopicSummary> topics, std::size_t top_n = 20);

inline constexpr const char* kOtherTag = "OTHER";

const std::string& pos_tag_of(const Vocabulary& vocab, std::uint32_t type);

// Entropy (nats) of the POS tag histogram over the given words.
double pos_entropy(std::span<const std::uint32_t> words, const Vocabulary& vocab);
inline double pos_entropy(const TopicSummary& topic, const Vocabulary& vocab, std::size_t top_n = 20) {
    return pos_entropy(topic.top_word_ids(top_n), vocab);
}

// Fraction of all top_n slots, across topics, held by each tag; largest first.
std::vector<std::pair<std::string, double>> pos_composition(std::span<const TopicSummary> topics,
                                                            const Vocabulary& vocab, std::size_t top_n = 20);

}  // namespace tokentopics
