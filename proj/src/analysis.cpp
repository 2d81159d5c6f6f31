#include "tokentopics/analysis.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace tokentopics {

namespace {

std::optional<double> as_number(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
    return v;
}

bool all_numeric(const std::vector<std::string>& labels) {
    return std::all_of(labels.begin(), labels.end(), [](const auto& l) { return as_number(l).has_value(); });
}

double entropy_of(const Eigen::Ref<const Eigen::VectorXd>& weights) {
    const double total = weights.sum();
    double h = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double p = weights(i) / total;
        if (p > 0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace

PartitionTable partition_prevalence(std::span<const std::uint32_t> assignments,
                                    std::span<const std::uint32_t> doc_ids, std::span<const DocumentMeta> meta,
                                    const std::string& scheme, std::uint32_t num_topics) {
    if (assignments.size() != doc_ids.size())
        throw IntegrityError(std::to_string(assignments.size()) + " assignments for " +
                             std::to_string(doc_ids.size()) + " tokens");
    std::unordered_map<std::uint32_t, const std::string*> label_of;
    std::vector<std::string> labels;
    for (const auto& m : meta) {
        if (auto it = m.labels.find(scheme); it != m.labels.end()) {
            label_of[m.doc_id] = &it->second;
            labels.push_back(it->second);
        }
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (all_numeric(labels))
        std::stable_sort(labels.begin(), labels.end(),
                         [](const auto& a, const auto& b) { return *as_number(a) < *as_number(b); });
    std::unordered_map<std::string, Eigen::Index> column;
    for (std::size_t l = 0; l < labels.size(); ++l) column[labels[l]] = static_cast<Eigen::Index>(l);

    PartitionTable table;
    table.scheme = scheme;
    table.labels = labels;
    table.counts = CountMatrix::Zero(num_topics, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        auto it = label_of.find(doc_ids[i]);
        if (it == label_of.end())
            throw MetadataError("document " + std::to_string(doc_ids[i]) + " has no '" + scheme + "' label");
        if (assignments[i] >= num_topics)
            throw IntegrityError("assignment " + std::to_string(assignments[i]) + " >= K=" +
                                 std::to_string(num_topics));
        ++table.counts(assignments[i], column.at(*it->second));
    }
    return table;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> prominent_topics(const PartitionTable& table,
                                                                      Eigen::Index label, std::size_t top_m) {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> ranked;
    for (Eigen::Index z = 0; z < table.counts.rows(); ++z)
        ranked.emplace_back(static_cast<std::uint32_t>(z), table.counts(z, label));
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(std::min(top_m, ranked.size()));
    return ranked;
}

std::vector<RankedTopic> uniform_topics(const PartitionTable& table, std::size_t top_m) {
    if (table.counts.size() == 0) throw InputError("partition table is empty");
    std::vector<RankedTopic> ranked;
    for (Eigen::Index z = 0; z < table.counts.rows(); ++z) {
        if (table.topic_total(z) == 0) continue;
        const Eigen::VectorXd row = table.counts.row(z).cast<double>().transpose();
        ranked.push_back({static_cast<std::uint32_t>(z), entropy_of(row)});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    ranked.resize(std::min(top_m, ranked.size()));
    return ranked;
}

TimeSeries time_series(const PartitionTable& table, SeriesNormalization normalize) {
    if (!all_numeric(table.labels))
        throw InputError("partition scheme '" + table.scheme + "' has labels without a numeric order");
    TimeSeries ts;
    ts.labels = table.labels;
    ts.series = table.counts.cast<double>();
    if (normalize == SeriesNormalization::per_label) {
        for (Eigen::Index t = 0; t < ts.series.cols(); ++t) {
            const double total = ts.series.col(t).sum();
            if (total > 0) ts.series.col(t) /= total;
        }
    }
    std::vector<RankedTopic> empty;
    for (Eigen::Index z = 0; z < ts.series.rows(); ++z) {
        const double mass = ts.series.row(z).sum();
        if (!(mass > 0)) {
            empty.push_back({static_cast<std::uint32_t>(z), 0.0});
            continue;
        }
        double mean = 0.0;
        for (Eigen::Index t = 0; t < ts.series.cols(); ++t) mean += static_cast<double>(t) * ts.series(z, t) / mass;
        ts.order.push_back({static_cast<std::uint32_t>(z), mean});
    }
    std::stable_sort(ts.order.begin(), ts.order.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
    ts.order.insert(ts.order.end(), empty.begin(), empty.end());
    return ts;
}

std::string sparkline(const Eigen::Ref<const Eigen::VectorXd>& values) {
    static const char* const kBlocks[] = {"▁", "▂", "▃", "▄",
                                          "▅", "▆", "▇", "█"};
    const double peak = values.size() ? values.maxCoeff() : 0.0;
    std::string out;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double level = peak > 0 ? values(i) / peak : 0.0;
        out += kBlocks[std::clamp(static_cast<int>(std::lround(level * 7)), 0, 7)];
    }
    return out;
}

double jensen_shannon(const std::map<std::uint32_t, double>& p, const std::map<std::uint32_t, double>& q) {
    // sum over the union support of 1/2 p log(2p/(p+q)) + 1/2 q log(2q/(p+q)),
    // i.e. H((P+Q)/2) - (H(P) + H(Q))/2 accumulated term by term
    double jsd = 0.0;
    auto term = [](double a, double b) { return a > 0 ? 0.5 * a * std::log(2.0 * a / (a + b)) : 0.0; };
    auto ip = p.begin();
    auto iq = q.begin();
    while (ip != p.end() || iq != q.end()) {
        double a = 0, b = 0;
        if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
            a = (ip++)->second;
        } else if (ip == p.end() || iq->first < ip->first) {
            b = (iq++)->second;
        } else {
            a = (ip++)->second;
            b = (iq++)->second;
        }
        jsd += term(a, b) + term(b, a);
    }
    return std::clamp(jsd, 0.0, std::numbers::ln2);
}

std::vector<PolysemyCandidate> polysemy_candidates(std::span<const TopicSummary> topics, std::size_t top_n) {
    if (topics.size() < 2) throw InputError("polysemy candidates need at least two topics");
    std::map<std::uint32_t, std::vector<std::uint32_t>> topics_of;
    for (const auto& t : topics)
        for (auto w : t.top_word_ids(top_n)) topics_of[w].push_back(t.topic_id);

    std::map<std::pair<std::uint32_t, std::uint32_t>, double> jsd_cache;
    std::vector<PolysemyCandidate> out;
    for (const auto& [w, zs] : topics_of) {
        if (zs.size() < 2) continue;
        PolysemyCandidate best{w, zs[0], zs[1], -1.0};
        for (std::size_t i = 0; i < zs.size(); ++i)
            for (std::size_t j = i + 1; j < zs.size(); ++j) {
                auto [it, fresh] = jsd_cache.try_emplace({zs[i], zs[j]}, 0.0);
                if (fresh) it->second = jensen_shannon(topics[zs[i]].word_dist, topics[zs[j]].word_dist);
                if (it->second > best.jsd) best = {w, zs[i], zs[j], it->second};
            }
        out.push_back(best);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.jsd > b.jsd; });
    return out;
}

const std::string& pos_tag_of(const Vocabulary& vocab, std::uint32_t type) {
    static const std::string other = kOtherTag;
    const auto& tag = vocab[type].pos_tag;
    return tag.empty() ? other : tag;
}

double pos_entropy(std::span<const std::uint32_t> words, const Vocabulary& vocab) {
    std::map<std::string, double> histogram;
    for (auto w : words) histogram[pos_tag_of(vocab, w)] += 1.0;
    Eigen::VectorXd counts(static_cast<Eigen::Index>(histogram.size()));
    Eigen::Index i = 0;
    for (const auto& [tag, c] : histogram) counts(i++) = c;
    return counts.size() ? entropy_of(counts) : 0.0;
}

std::vector<std::pair<std::string, double>> pos_composition(std::span<const TopicSummary> topics,
                                                            const Vocabulary& vocab, std::size_t top_n) {
    std::map<std::string, std::uint64_t> slots;
    std::uint64_t total = 0;
    for (const auto& t : topics)
        for (auto w : t.top_word_ids(top_n)) {
            ++slots[pos_tag_of(vocab, w)];
            ++total;
        }
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [tag, c] : slots) out.emplace_back(tag, static_cast<double>(c) / static_cast<double>(total));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace tokentopics
