#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokentopics {

using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One token occurrence (or one subword row, when the file carries subword groups).
struct TokenRecord {
    std::uint32_t doc_id = 0;
    std::uint32_t word_index = 0;
    std::uint32_t type_id = 0;
    Eigen::VectorXf vector;
};

// Binary layout, little-endian:
//   "TKC1" | version u32 | dim u32 | token_count u64 | flags u32 (bit0 = subword groups)
//   token_count x { doc_id u32 | word_index u32 | type_id u32 | dim x f32 }
struct CorpusHeader {
    static constexpr std::array<char, 4> kMagic{'T', 'K', 'C', '1'};
    static constexpr std::uint32_t kVersion = 1;
    static constexpr std::uint64_t kHeaderBytes = 4 + 4 + 4 + 8 + 4;

    std::uint32_t dim = 0;
    std::uint64_t token_count = 0;
    bool has_subword_groups = false;

    std::uint64_t record_bytes() const { return 12 + 4 * static_cast<std::uint64_t>(dim); }
};

// In-memory token stream, stored column-wise with vectors packed row-major.
class TokenCorpus {
public:
    TokenCorpus() = default;
    explicit TokenCorpus(std::uint32_t dim, bool has_subword_groups = false)
        : dim_(dim), subword_groups_(has_subword_groups) {}

    std::uint32_t dim() const { return dim_; }
    std::size_t size() const { return type_ids_.size(); }
    bool empty() const { return type_ids_.empty(); }
    bool has_subword_groups() const { return subword_groups_; }
    void set_subword_groups(bool v) { subword_groups_ = v; }

    CorpusHeader header() const { return {dim_, size(), subword_groups_}; }

    void reserve(std::size_t n);
    void push_back(std::uint32_t doc_id, std::uint32_t word_index, std::uint32_t type_id,
                   std::span<const float> vector);
    void push_back(const TokenRecord& r);

    TokenRecord record(std::size_t i) const;

    std::span<const std::uint32_t> doc_ids() const { return doc_ids_; }
    std::span<const std::uint32_t> word_indices() const { return word_indices_; }
    std::span<const std::uint32_t> type_ids() const { return type_ids_; }

    Eigen::Map<const EmbeddingMatrix> vectors() const {
        return {values_.data(), static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_)};
    }
    Eigen::Map<EmbeddingMatrix> vectors() {
        return {values_.data(), static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_)};
    }
    std::span<const float> vector(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }

    // Copy of the id columns with a replacement vector payload of any width.
    TokenCorpus with_vectors(const EmbeddingMatrix& vectors) const;

    // Number of distinct documents, i.e. max doc_id + 1 (0 for an empty corpus).
    std::uint32_t document_count() const;

private:
    std::uint32_t dim_ = 0;
    bool subword_groups_ = false;
    std::vector<std::uint32_t> doc_ids_;
    std::vector<std::uint32_t> word_indices_;
    std::vector<std::uint32_t> type_ids_;
    std::vector<float> values_;
};

// Sequential single-pass reader. Throws FormatError on a bad header,
// CorruptionError on truncation or trailing bytes, OrderingError when a
// document's word positions go backwards.
class CorpusReader {
public:
    explicit CorpusReader(const std::filesystem::path& path);

    const CorpusHeader& header() const { return header_; }
    std::uint64_t records_read() const { return read_; }

    std::optional<TokenRecord> next();

    // Appends up to max_records records to out; returns how many were read.
    std::size_t read_batch(std::size_t max_records, TokenCorpus& out);

private:
    bool read_one(std::uint32_t& doc, std::uint32_t& word, std::uint32_t& type, float* vec);
    void finish();

    std::ifstream in_;
    CorpusHeader header_;
    std::uint64_t read_ = 0;
    std::uint64_t offset_ = 0;
    std::unordered_map<std::uint32_t, std::uint32_t> last_word_;
    std::vector<char> buffer_;
};

// Streaming writer; the token count in the header is patched on finish().
class CorpusWriter {
public:
    CorpusWriter(const std::filesystem::path& path, std::uint32_t dim, bool has_subword_groups);
    ~CorpusWriter();
    CorpusWriter(const CorpusWriter&) = delete;
    CorpusWriter& operator=(const CorpusWriter&) = delete;

    void write(std::uint32_t doc_id, std::uint32_t word_index, std::uint32_t type_id,
               std::span<const float> vector);
    void finish();

private:
    std::ofstream out_;
    std::uint32_t dim_;
    bool subword_groups_;
    std::uint64_t count_ = 0;
    bool finished_ = false;
};

TokenCorpus read_corpus(const std::filesystem::path& path,
                        std::optional<std::uint32_t> expected_dim = std::nullopt);
void write_corpus(const std::filesystem::path& path, const TokenCorpus& corpus);

// Id columns only (dim 0); the vectors are read and dropped batch by batch.
TokenCorpus read_token_ids(const std::filesystem::path& path);

// Averages contiguous (doc_id, word_index) subword groups into word-level tokens.
TokenCorpus merge_subwords(const TokenCorpus& rows);

struct VocabEntry {
    std::string surface;
    std::uint64_t doc_frequency = 0;
    std::string pos_tag;  // empty when untagged
};

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::uint64_t total_docs) : total_docs_(total_docs) {}

    std::uint32_t add(std::string surface, std::uint64_t doc_frequency = 0, std::string pos_tag = {});

    std::size_t size() const { return entries_.size(); }
    const VocabEntry& operator[](std::size_t i) const { return entries_[i]; }
    VocabEntry& operator[](std::size_t i) { return entries_[i]; }
    const std::vector<VocabEntry>& entries() const { return entries_; }

    std::optional<std::uint32_t> find(std::string_view surface) const;

    std::uint64_t total_docs() const { return total_docs_; }
    void set_total_docs(std::uint64_t n) { total_docs_ = n; }

    // Replaces every doc_frequency with counts recomputed from the corpus.
    void set_doc_frequencies(std::span<const std::uint64_t> df);

    // Throws IntegrityError unless 0 < doc_frequency <= total_docs for every entry.
    void validate() const;

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t total_docs_ = 0;
};

// Tab-separated: surface, doc_frequency, POS tag ("-" when untagged).
Vocabulary read_vocabulary(const std::filesystem::path& path, std::uint64_t total_docs = 0);
void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);

struct DocumentMeta {
    std::uint32_t doc_id = 0;
    std::map<std::string, std::string> labels;
};

// Tab-separated: doc_id, then name=value fields. Sorted by doc_id on return.
std::vector<DocumentMeta> read_metadata(const std::filesystem::path& path);
void write_metadata(const std::filesystem::path& path, std::span<const DocumentMeta> meta);

// Number of documents containing each type, indexed by type_id.
std::vector<std::uint64_t> compute_doc_frequencies(const TokenCorpus& corpus, std::size_t vocab_size);

// Throws IntegrityError if any type_id >= vocab size or doc_id >= doc_count.
void check_corpus(const TokenCorpus& corpus, std::size_t vocab_size, std::uint64_t doc_count);

}  // namespace tokentopics
