#include "tokentopics/metrics.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>

namespace tokentopics {

void CoherenceConfig::validate() const {
    if (!(epsilon > 0)) throw ConfigError("coherence epsilon must be positive");
    if (top_n < 2) throw ConfigError("top_n must be >= 2");
    if (window < 2) throw ConfigError("window must be >= 2");
}

std::optional<double> word_entropy(const TopicSummary& topic) {
    if (topic.empty()) return std::nullopt;
    double h = 0.0;
    for (const auto& [w, p] : topic.word_dist)
        if (p > 0) h -= p * std::log(p);
    return h;
}

double internal_coherence(std::span<const std::uint32_t> top_words, const CooccurrenceCounts& docs,
                          const CoherenceConfig& cfg) {
    cfg.validate();
    const auto n = std::min(top_words.size(), cfg.top_n);
    for (std::size_t i = 0; i < n; ++i)
        if (docs.count(top_words[i]) == 0)
            throw IntegrityError("top word " + std::to_string(top_words[i]) + " occurs in no working document");
    double score = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const auto joint = static_cast<double>(docs.pair_count(top_words[i], top_words[j]));
            score += std::log((joint + cfg.epsilon) / static_cast<double>(docs.count(top_words[j])));
        }
    return score;
}

std::optional<double> external_coherence(std::span<const std::uint32_t> top_words, const CooccurrenceCounts& windows,
                                         const CoherenceConfig& cfg) {
    cfg.validate();
    if (windows.units() == 0) throw ConfigError("reference index holds no windows");
    std::vector<std::uint32_t> attested;
    for (std::size_t i = 0; i < std::min(top_words.size(), cfg.top_n); ++i)
        if (windows.count(top_words[i]) > 0) attested.push_back(top_words[i]);
    if (attested.size() < cfg.min_attested) return std::nullopt;

    const auto total = static_cast<double>(windows.units());
    auto prob = [&](std::uint32_t w) { return static_cast<double>(windows.count(w)) / total; };
    double score = 0.0;
    for (std::size_t i = 1; i < attested.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double joint = static_cast<double>(windows.pair_count(attested[i], attested[j])) / total;
            score += std::log((joint + cfg.epsilon) / (prob(attested[i]) * prob(attested[j])));
        }
    return score;
}

double word_exclusivity(std::span<const TopicSummary> topics, std::uint32_t topic_id, std::uint32_t type) {
    double total = 0.0;
    for (const auto& t : topics) total += t.probability(type);
    if (!(total > 0))
        throw IntegrityError("type " + std::to_string(type) + " has no probability mass in any topic");
    return topics[topic_id].probability(type) / total;
}

std::optional<double> exclusivity(std::span<const TopicSummary> topics, std::uint32_t topic_id,
                                  const CoherenceConfig& cfg) {
    const auto& topic = topics[topic_id];
    if (topic.empty()) return std::nullopt;
    const auto words = topic.top_word_ids(cfg.top_n);
    double sum = 0.0;
    for (auto w : words) sum += word_exclusivity(topics, topic_id, w);
    return sum / static_cast<double>(words.size());
}

std::vector<std::uint32_t> watched_words(std::span<const TopicSummary> topics, std::size_t top_n) {
    std::set<std::uint32_t> words;
    for (const auto& t : topics)
        for (auto w : t.top_word_ids(top_n)) words.insert(w);
    return {words.begin(), words.end()};
}

std::vector<TopicMetrics> evaluate_topics(std::span<const TopicSummary> topics, const CooccurrenceCounts& docs,
                                          const CooccurrenceCounts* reference, const CoherenceConfig& cfg) {
    cfg.validate();
    std::vector<TopicMetrics> rows;
    rows.reserve(topics.size());
    for (const auto& t : topics) {
        TopicMetrics m;
        m.topic_id = t.topic_id;
        m.tokens = t.total_tokens;
        m.distinct = distinct_word_count(t);
        m.has_reference = reference != nullptr;
        if (!t.empty()) {
            const auto words = t.top_word_ids(cfg.top_n);
            m.entropy = word_entropy(t);
            m.internal = internal_coherence(words, docs, cfg);
            if (reference) m.external = external_coherence(words, *reference, cfg);
            m.exclusivity = exclusivity(topics, t.topic_id, cfg);
        }
        rows.push_back(m);
    }
    return rows;
}

void write_metric_header(std::ostream& out) {
    out << "model\ttopic\ttokens\tentropy\tinternal\texternal\texclusivity\tdistinct\n";
}

void write_metric_rows(std::ostream& out, const std::string& model, std::span<const TopicMetrics> rows) {
    auto value = [&](const std::optional<double>& v) {
        if (v)
            out << std::setprecision(10) << *v;
        else
            out << "NA";
    };
    for (const auto& r : rows) {
        out << model << '\t' << r.topic_id << '\t' << r.tokens << '\t';
        value(r.entropy);
        out << '\t';
        value(r.internal);
        out << '\t';
        if (r.has_reference && r.tokens > 0 && !r.external)
            out << "skipped";
        else
            value(r.external);
        out << '\t';
        value(r.exclusivity);
        out << '\t' << r.distinct << '\n';
    }
}

}  // namespace tokentopics
