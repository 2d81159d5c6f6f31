#pragma once

#include "tokentopics/assignment_model.hpp"
#include "tokentopics/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace tokentopics {

struct LdaOptions {
    double alpha = 0.0;  // symmetric per-topic prior; 0 selects 5 / K
    double beta = 0.01;
    std::uint32_t iterations = 1000;
    std::uint64_t seed = 0;
};

using CountTable = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct LdaState {
    std::uint32_t num_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::uint32_t sweeps = 0;
    std::uint32_t vocab_in_use = 0;          // distinct types present; the V in V * beta
    std::vector<std::uint32_t> assignments;  // one topic per token
    CountTable doc_topic;                    // D x K
    CountTable topic_word;                   // K x vocab_size
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> topic_total;

    // True when every count table equals a full recount of the assignments.
    bool consistent(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids) const;

    // Smoothed Pr(w | z) = (n_zw + beta) / (n_z + V beta), K x vocab_size.
    Eigen::MatrixXd topic_word_distribution() const;
};

// Collapsed Gibbs sampler with fixed symmetric priors. Each sweep visits
// tokens in stream order and resamples from
//   (n_dk + alpha)(n_kw + beta) / (n_k + V beta)
// with the token's own assignment removed.
class GibbsSampler {
public:
    GibbsSampler(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids,
                 std::uint32_t vocab_size, std::uint32_t num_topics, const LdaOptions& opt);

    void sweep();
    void run(std::uint32_t sweeps) {
        for (std::uint32_t s = 0; s < sweeps; ++s) sweep();
    }

    const LdaState& state() const { return state_; }
    LdaState release() { return std::move(state_); }

    // Normalized full conditional of token i, computed as if i were removed.
    Eigen::VectorXd conditional(std::size_t i) const;

    void remove(std::size_t i);
    void add(std::size_t i, std::uint32_t topic);

    std::span<const std::uint32_t> doc_ids() const { return doc_ids_; }
    std::span<const std::uint32_t> type_ids() const { return type_ids_; }

private:
    void weights(std::size_t i, bool removed, Eigen::VectorXd& out) const;

    std::span<const std::uint32_t> doc_ids_;
    std::span<const std::uint32_t> type_ids_;
    LdaState state_;
    Rng rng_;
    Eigen::VectorXd buffer_;
};

LdaState gibbs_fit(std::span<const std::uint32_t> doc_ids, std::span<const std::uint32_t> type_ids,
                   std::uint32_t vocab_size, std::uint32_t num_topics, const LdaOptions& opt);

AssignmentModel to_assignment_model(const LdaState& state);

}  // namespace tokentopics
