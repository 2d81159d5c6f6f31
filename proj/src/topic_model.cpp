#include "tokentopics/topic_model.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>
#include <iomanip>

namespace tokentopics {

std::vector<std::uint32_t> TopicSummary::top_word_ids(std::size_t n) const {
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < top_words.size() && i < n; ++i) ids.push_back(top_words[i].first);
    return ids;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> rank_words(const std::map<std::uint32_t, std::uint64_t>& counts,
                                                                 std::size_t top_n) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> ranked(counts.begin(), counts.end());
    const auto n = std::min(top_n, ranked.size());
    // map iteration already yields ascending type_id, so a stable sort keeps the tie order
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(n);
    return ranked;
}

std::vector<TopicSummary> summarize(std::span<const std::uint32_t> assignments,
                                    std::span<const std::uint32_t> type_ids, std::uint32_t num_topics,
                                    std::size_t top_n) {
    if (assignments.size() != type_ids.size())
        throw IntegrityError(std::to_string(assignments.size()) + " assignments for " +
                             std::to_string(type_ids.size()) + " tokens");
    std::vector<TopicSummary> topics(num_topics);
    for (std::uint32_t z = 0; z < num_topics; ++z) topics[z].topic_id = z;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const auto z = assignments[i];
        if (z >= num_topics)
            throw IntegrityError("token " + std::to_string(i) + " assigned to topic " + std::to_string(z) +
                                 " >= K=" + std::to_string(num_topics));
        ++topics[z].word_counts[type_ids[i]];
        ++topics[z].total_tokens;
    }
    for (auto& t : topics) {
        for (const auto& [w, c] : t.word_counts)
            t.word_dist[w] = static_cast<double>(c) / static_cast<double>(t.total_tokens);
        t.top_words = rank_words(t.word_counts, top_n);
    }
    return topics;
}

std::vector<DocTopicRow> doc_topic_matrix(std::span<const std::uint32_t> assignments,
                                          std::span<const std::uint32_t> doc_ids, std::uint32_t num_topics,
                                          std::uint32_t num_docs) {
    if (assignments.size() != doc_ids.size())
        throw IntegrityError(std::to_string(assignments.size()) + " assignments for " +
                             std::to_string(doc_ids.size()) + " tokens");
    std::vector<DocTopicRow> rows(num_docs);
    for (std::uint32_t d = 0; d < num_docs; ++d) {
        rows[d].doc_id = d;
        rows[d].proportions = Eigen::VectorXd::Zero(num_topics);
    }
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= num_topics)
            throw IntegrityError("token " + std::to_string(i) + " assigned to topic " +
                                 std::to_string(assignments[i]) + " >= K=" + std::to_string(num_topics));
        if (doc_ids[i] >= num_docs)
            throw IntegrityError("token " + std::to_string(i) + " has doc_id " + std::to_string(doc_ids[i]) +
                                 " >= document count " + std::to_string(num_docs));
        auto& row = rows[doc_ids[i]];
        row.proportions(assignments[i]) += 1.0;
        ++row.tokens;
    }
    for (auto& row : rows)
        if (row.tokens > 0) row.proportions /= static_cast<double>(row.tokens);
    return rows;
}

void write_topic_summaries(std::ostream& out, std::span<const TopicSummary> topics, const Vocabulary& vocab) {
    out << "topic\ttokens\tdistinct\ttop_words\n";
    for (const auto& t : topics) {
        out << t.topic_id << '\t' << t.total_tokens << '\t' << t.word_counts.size() << '\t';
        for (std::size_t i = 0; i < t.top_words.size(); ++i) {
            if (i) out << ' ';
            out << vocab[t.top_words[i].first].surface << ':' << t.top_words[i].second;
        }
        out << '\n';
    }
}

void write_doc_topics(std::ostream& out, std::span<const DocTopicRow> rows) {
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.doc_id << '\t' << r.tokens;
        for (Eigen::Index z = 0; z < r.proportions.size(); ++z) out << '\t' << r.proportions(z);
        out << '\n';
    }
}

}  // namespace tokentopics
