#include "tokentopics/lda.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>

namespace tokentopics {

bool LdaState::consistent(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids) const {
    CountTable dk = CountTable::Zero(doc_topic.rows(), doc_topic.cols());
    CountTable kw = CountTable::Zero(topic_word.rows(), topic_word.cols());
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(topic_total.size());
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++dk(doc_ids[i], assignments[i]);
        ++kw(assignments[i], type_ids[i]);
        ++k(assignments[i]);
    }
    return dk == doc_topic && kw == topic_word && k == topic_total;
}

Eigen::MatrixXd LdaState::topic_word_distribution() const {
    Eigen::MatrixXd phi = topic_word.cast<double>().array() + beta;
    const double vbeta = static_cast<double>(vocab_in_use) * beta;
    for (Eigen::Index z = 0; z < phi.rows(); ++z) phi.row(z) /= static_cast<double>(topic_total(z)) + vbeta;
    return phi;
}

GibbsSampler::GibbsSampler(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids,
                           std::uint32_t vocab_size, std::uint32_t num_topics, const LdaOptions& opt)
    : doc_ids_(doc_ids), type_ids_(type_ids), rng_(opt.seed) {
    if (num_topics == 0) throw InputError("LDA needs at least one topic");
    if (type_ids.empty()) throw InputError("LDA needs a non-empty corpus");
    if (doc_ids.size() != type_ids.size()) throw IntegrityError("doc and type columns differ in length");
    if (!(opt.beta > 0)) throw ConfigError("beta must be positive");
    if (opt.alpha < 0) throw ConfigError("alpha must be positive");

    const std::uint32_t docs = *std::max_element(doc_ids.begin(), doc_ids.end()) + 1;
    std::vector<bool> present(vocab_size, false);
    for (auto w : type_ids) {
        if (w >= vocab_size) throw IntegrityError("type_id " + std::to_string(w) + " outside vocabulary");
        present[w] = true;
    }

    state_.num_topics = num_topics;
    state_.alpha = opt.alpha > 0 ? opt.alpha : 5.0 / num_topics;
    state_.beta = opt.beta;
    state_.seed = opt.seed;
    state_.vocab_in_use = static_cast<std::uint32_t>(std::count(present.begin(), present.end(), true));
    state_.doc_topic = CountTable::Zero(docs, num_topics);
    state_.topic_word = CountTable::Zero(num_topics, vocab_size);
    state_.topic_total = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(num_topics);
    state_.assignments.resize(type_ids.size());
    buffer_.resize(num_topics);

    for (std::size_t i = 0; i < type_ids.size(); ++i) add(i, static_cast<std::uint32_t>(rng_.index(num_topics)));
}

void GibbsSampler::remove(std::size_t i) {
    const auto z = state_.assignments[i];
    --state_.doc_topic(doc_ids_[i], z);
    --state_.topic_word(z, type_ids_[i]);
    --state_.topic_total(z);
}

void GibbsSampler::add(std::size_t i, std::uint32_t z) {
    state_.assignments[i] = z;
    ++state_.doc_topic(doc_ids_[i], z);
    ++state_.topic_word(z, type_ids_[i]);
    ++state_.topic_total(z);
}

void GibbsSampler::weights(std::size_t i, bool removed, Eigen::VectorXd& out) const {
    const auto d = doc_ids_[i];
    const auto w = type_ids_[i];
    const auto own = state_.assignments[i];
    const double vbeta = static_cast<double>(state_.vocab_in_use) * state_.beta;
    for (std::uint32_t z = 0; z < state_.num_topics; ++z) {
        const std::int64_t self = (!removed && z == own) ? 1 : 0;
        out(z) = (static_cast<double>(state_.doc_topic(d, z) - self) + state_.alpha) *
                 (static_cast<double>(state_.topic_word(z, w) - self) + state_.beta) /
                 (static_cast<double>(state_.topic_total(z) - self) + vbeta);
    }
}

Eigen::VectorXd GibbsSampler::conditional(std::size_t i) const {
    Eigen::VectorXd p(state_.num_topics);
    weights(i, false, p);
    return p / p.sum();
}

void GibbsSampler::sweep() {
    for (std::size_t i = 0; i < type_ids_.size(); ++i) {
        remove(i);
        weights(i, true, buffer_);
        double total = 0.0;
        for (Eigen::Index z = 0; z < buffer_.size(); ++z) total += buffer_(z);
        const double target = rng_.uniform() * total;
        std::uint32_t pick = state_.num_topics - 1;
        double acc = 0.0;
        for (std::uint32_t z = 0; z < state_.num_topics; ++z) {
            acc += buffer_(z);
            if (acc > target) {
                pick = z;
                break;
            }
        }
        add(i, pick);
    }
    ++state_.sweeps;
}

LdaState gibbs_fit(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids,
                   std::uint32_t vocab_size, std::uint32_t num_topics, const LdaOptions& opt) {
    GibbsSampler sampler(doc_ids, type_ids, vocab_size, num_topics, opt);
    sampler.run(opt.iterations);
    return sampler.release();
}

AssignmentModel to_assignment_model(const LdaState& s) {
    AssignmentModel m;
    m.kind = ModelKind::lda;
    m.num_topics = s.num_topics;
    m.seed = s.seed;
    m.iterations = s.sweeps;
    m.alpha = s.alpha;
    m.beta = s.beta;
    m.assignments = s.assignments;
    return m;
}

}  // namespace tokentopics
