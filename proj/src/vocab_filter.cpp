#include "tokentopics/vocab_filter.hpp"

#include "tokentopics/errors.hpp"

#include <sstream>

namespace tokentopics {

namespace {

std::string describe(const FilterPolicy& p, std::uint64_t total_docs) {
    std::ostringstream s;
    s << "max_doc_fraction=" << p.max_doc_fraction << " min_doc_count=" << p.min_doc_count
      << " total_docs=" << total_docs;
    return s.str();
}

}  // namespace

void FilterPolicy::validate(std::uint64_t total_docs) const {
    if (!(max_doc_fraction > 0.0 && max_doc_fraction <= 1.0))
        throw PolicyError("max_doc_fraction must lie in (0, 1]: " + describe(*this, total_docs));
    if (min_doc_count < 1) throw PolicyError("min_doc_count must be >= 1: " + describe(*this, total_docs));
    if (static_cast<double>(min_doc_count) > max_doc_fraction * static_cast<double>(total_docs))
        throw PolicyError("degenerate filter policy removes every type: " + describe(*this, total_docs));
}

FilterResult filter_tokens(const TokenCorpus& corpus, const Vocabulary& vocab, const FilterPolicy& policy) {
    const auto total = vocab.total_docs();
    policy.validate(total);

    FilterResult result;
    result.keep.resize(vocab.size());
    for (std::size_t t = 0; t < vocab.size(); ++t) {
        result.keep[t] = policy.keeps(vocab[t].doc_frequency, total);
        result.kept_types += result.keep[t];
    }
    if (result.kept_types == 0)
        throw PolicyError("filter policy keeps no types: " + describe(policy, total));

    result.corpus = TokenCorpus(corpus.dim(), corpus.has_subword_groups());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto type = corpus.type_ids()[i];
        if (type >= vocab.size())
            throw IntegrityError("type_id " + std::to_string(type) + " outside vocabulary");
        if (result.keep[type])
            result.corpus.push_back(corpus.doc_ids()[i], corpus.word_indices()[i], type, corpus.vector(i));
    }
    return result;
}

}  // namespace tokentopics
