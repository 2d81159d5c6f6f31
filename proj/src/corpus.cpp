#include "tokentopics/corpus.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

namespace tokentopics {

static_assert(std::endian::native == std::endian::little,
              "corpus files are little-endian; big-endian hosts need byte swapping");

namespace {

template <typename T>
T load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

template <typename T>
void store(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size() || s.starts_with('-')) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(context + ": expected a non-negative integer, got '" + s + "'");
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

// ---- TokenCorpus ----------------------------------------------------------

void TokenCorpus::reserve(std::size_t n) {
    doc_ids_.reserve(n);
    word_indices_.reserve(n);
    type_ids_.reserve(n);
    values_.reserve(n * dim_);
}

void TokenCorpus::push_back(std::uint32_t doc_id, std::uint32_t word_index, std::uint32_t type_id,
                            std::span<const float> vector) {
    if (vector.size() != dim_)
        throw DimensionError("token vector has " + std::to_string(vector.size()) +
                             " components, corpus dim is " + std::to_string(dim_));
    doc_ids_.push_back(doc_id);
    word_indices_.push_back(word_index);
    type_ids_.push_back(type_id);
    values_.insert(values_.end(), vector.begin(), vector.end());
}

void TokenCorpus::push_back(const TokenRecord& r) {
    push_back(r.doc_id, r.word_index, r.type_id,
              std::span<const float>(r.vector.data(), static_cast<std::size_t>(r.vector.size())));
}

TokenRecord TokenCorpus::record(std::size_t i) const {
    TokenRecord r;
    r.doc_id = doc_ids_[i];
    r.word_index = word_indices_[i];
    r.type_id = type_ids_[i];
    r.vector = Eigen::Map<const Eigen::VectorXf>(values_.data() + i * dim_, dim_);
    return r;
}

TokenCorpus TokenCorpus::with_vectors(const EmbeddingMatrix& vectors) const {
    if (static_cast<std::size_t>(vectors.rows()) != size())
        throw DimensionError("replacement payload has " + std::to_string(vectors.rows()) +
                             " rows for " + std::to_string(size()) + " tokens");
    TokenCorpus out(static_cast<std::uint32_t>(vectors.cols()), subword_groups_);
    out.doc_ids_ = doc_ids_;
    out.word_indices_ = word_indices_;
    out.type_ids_ = type_ids_;
    out.values_.assign(vectors.data(), vectors.data() + vectors.size());
    return out;
}

std::uint32_t TokenCorpus::document_count() const {
    if (doc_ids_.empty()) return 0;
    return *std::max_element(doc_ids_.begin(), doc_ids_.end()) + 1;
}

// ---- CorpusReader ---------------------------------------------------------

CorpusReader::CorpusReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open corpus file " + path.string());

    char raw[CorpusHeader::kHeaderBytes];
    in_.read(raw, sizeof raw);
    const auto got = static_cast<std::uint64_t>(in_.gcount());
    if (got >= 4 && std::memcmp(raw, CorpusHeader::kMagic.data(), 4) != 0)
        throw FormatError("bad magic in " + path.string() + ": not a TKC1 corpus file");
    if (got < CorpusHeader::kHeaderBytes) throw CorruptionError("truncated corpus header", got);

    const auto version = load<std::uint32_t>(raw + 4);
    if (version != CorpusHeader::kVersion)
        throw FormatError("unsupported corpus version " + std::to_string(version));
    header_.dim = load<std::uint32_t>(raw + 8);
    header_.token_count = load<std::uint64_t>(raw + 12);
    const auto flags = load<std::uint32_t>(raw + 20);
    if (flags & ~1u) throw FormatError("unknown corpus flag bits " + std::to_string(flags));
    header_.has_subword_groups = (flags & 1u) != 0;
    if (header_.dim == 0) throw FormatError("corpus dim must be positive");

    offset_ = CorpusHeader::kHeaderBytes;
    buffer_.resize(header_.record_bytes());
    if (header_.token_count == 0) finish();
}

bool CorpusReader::read_one(std::uint32_t& doc, std::uint32_t& word, std::uint32_t& type, float* vec) {
    if (read_ == header_.token_count) return false;
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (static_cast<std::size_t>(in_.gcount()) != buffer_.size())
        throw CorruptionError("truncated record " + std::to_string(read_) + " of " +
                                  std::to_string(header_.token_count),
                              offset_);
    doc = load<std::uint32_t>(buffer_.data());
    word = load<std::uint32_t>(buffer_.data() + 4);
    type = load<std::uint32_t>(buffer_.data() + 8);
    std::memcpy(vec, buffer_.data() + 12, 4 * static_cast<std::size_t>(header_.dim));
    for (std::uint32_t i = 0; i < header_.dim; ++i)
        if (!std::isfinite(vec[i]))
            throw FormatError("non-finite vector component in record " + std::to_string(read_));

    auto [it, inserted] = last_word_.try_emplace(doc, word);
    if (!inserted) {
        if (word < it->second)
            throw OrderingError("word_index decreases within document " + std::to_string(doc) +
                                " at record " + std::to_string(read_));
        it->second = word;
    }
    offset_ += buffer_.size();
    if (++read_ == header_.token_count) finish();
    return true;
}

void CorpusReader::finish() {
    if (in_.peek() != std::char_traits<char>::eof())
        throw CorruptionError("trailing bytes after " + std::to_string(header_.token_count) +
                                  " records",
                              offset_);
}

std::optional<TokenRecord> CorpusReader::next() {
    TokenRecord r;
    r.vector.resize(header_.dim);
    if (!read_one(r.doc_id, r.word_index, r.type_id, r.vector.data())) return std::nullopt;
    return r;
}

std::size_t CorpusReader::read_batch(std::size_t max_records, TokenCorpus& out) {
    if (out.dim() != header_.dim)
        throw DimensionError("batch dim " + std::to_string(out.dim()) + " != corpus dim " +
                             std::to_string(header_.dim));
    std::vector<float> vec(header_.dim);
    std::size_t n = 0;
    std::uint32_t doc, word, type;
    while (n < max_records && read_one(doc, word, type, vec.data())) {
        out.push_back(doc, word, type, vec);
        ++n;
    }
    return n;
}

// ---- CorpusWriter ---------------------------------------------------------

CorpusWriter::CorpusWriter(const std::filesystem::path& path, std::uint32_t dim, bool has_subword_groups)
    : out_(path, std::ios::binary | std::ios::trunc), dim_(dim), subword_groups_(has_subword_groups) {
    if (!out_) throw IoError("cannot write corpus file " + path.string());
    if (dim == 0) throw FormatError("corpus dim must be positive");
    out_.write(CorpusHeader::kMagic.data(), 4);
    store<std::uint32_t>(out_, CorpusHeader::kVersion);
    store<std::uint32_t>(out_, dim_);
    store<std::uint64_t>(out_, 0);
    store<std::uint32_t>(out_, subword_groups_ ? 1u : 0u);
}

CorpusWriter::~CorpusWriter() {
    if (!finished_) {
        try {
            finish();
        } catch (...) {
        }
    }
}

void CorpusWriter::write(std::uint32_t doc_id, std::uint32_t word_index, std::uint32_t type_id,
                         std::span<const float> vector) {
    if (vector.size() != dim_)
        throw DimensionError("record has " + std::to_string(vector.size()) + " components, expected " +
                             std::to_string(dim_));
    store(out_, doc_id);
    store(out_, word_index);
    store(out_, type_id);
    out_.write(reinterpret_cast<const char*>(vector.data()),
               static_cast<std::streamsize>(vector.size() * sizeof(float)));
    ++count_;
}

void CorpusWriter::finish() {
    if (finished_) return;
    finished_ = true;
    out_.seekp(12);
    store<std::uint64_t>(out_, count_);
    out_.close();
    if (!out_) throw IoError("failed writing corpus file");
}

TokenCorpus read_corpus(const std::filesystem::path& path, std::optional<std::uint32_t> expected_dim) {
    CorpusReader reader(path);
    const auto& h = reader.header();
    if (expected_dim && *expected_dim != h.dim)
        throw FormatError("corpus dim " + std::to_string(h.dim) + " does not match expected " +
                          std::to_string(*expected_dim));
    TokenCorpus corpus(h.dim, h.has_subword_groups);
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    const std::uint64_t fits = ec ? 0 : (bytes - CorpusHeader::kHeaderBytes) / h.record_bytes();
    corpus.reserve(static_cast<std::size_t>(std::min(h.token_count, fits)));
    reader.read_batch(h.token_count, corpus);
    return corpus;
}

TokenCorpus read_token_ids(const std::filesystem::path& path) {
    CorpusReader reader(path);
    TokenCorpus ids(0, reader.header().has_subword_groups);
    TokenCorpus batch(reader.header().dim, reader.header().has_subword_groups);
    constexpr std::size_t kBatch = 1 << 16;
    while (reader.read_batch(kBatch, batch) > 0) {
        for (std::size_t i = 0; i < batch.size(); ++i)
            ids.push_back(batch.doc_ids()[i], batch.word_indices()[i], batch.type_ids()[i], {});
        batch = TokenCorpus(reader.header().dim, reader.header().has_subword_groups);
    }
    return ids;
}

void write_corpus(const std::filesystem::path& path, const TokenCorpus& corpus) {
    CorpusWriter w(path, corpus.dim(), corpus.has_subword_groups());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        w.write(corpus.doc_ids()[i], corpus.word_indices()[i], corpus.type_ids()[i], corpus.vector(i));
    w.finish();
}

// ---- merge_subwords -------------------------------------------------------

TokenCorpus merge_subwords(const TokenCorpus& rows) {
    if (!rows.has_subword_groups())
        throw InputError("merge_subwords needs a corpus flagged with subword groups");

    const std::uint32_t dim = rows.dim();
    TokenCorpus out(dim, false);
    // Last completed word position per document; a group may not reopen behind it.
    std::unordered_map<std::uint32_t, std::uint32_t> closed;
    Eigen::VectorXd sum(dim);
    Eigen::VectorXf mean(dim);

    std::size_t i = 0;
    while (i < rows.size()) {
        const auto doc = rows.doc_ids()[i];
        const auto word = rows.word_indices()[i];
        const auto type = rows.type_ids()[i];
        if (auto it = closed.find(doc); it != closed.end() && word <= it->second)
            throw OrderingError("subword group (doc " + std::to_string(doc) + ", word " +
                                std::to_string(word) + ") is not contiguous at row " +
                                std::to_string(i));
        sum.setZero();
        std::size_t n = 0;
        for (; i < rows.size() && rows.doc_ids()[i] == doc && rows.word_indices()[i] == word; ++i, ++n) {
            if (rows.type_ids()[i] != type)
                throw IntegrityError("subword rows of (doc " + std::to_string(doc) + ", word " +
                                     std::to_string(word) + ") disagree on type_id");
            sum += rows.vectors().row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
        }
        mean = (sum / static_cast<double>(n)).cast<float>();
        out.push_back(doc, word, type, std::span<const float>(mean.data(), dim));
        closed[doc] = word;
    }
    return out;
}

// ---- Vocabulary -----------------------------------------------------------

std::uint32_t Vocabulary::add(std::string surface, std::uint64_t doc_frequency, std::string pos_tag) {
    if (index_.contains(surface)) throw IntegrityError("duplicate vocabulary entry '" + surface + "'");
    const auto id = static_cast<std::uint32_t>(entries_.size());
    index_.emplace(surface, id);
    entries_.push_back({std::move(surface), doc_frequency, std::move(pos_tag)});
    return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view surface) const {
    if (auto it = index_.find(std::string(surface)); it != index_.end()) return it->second;
    return std::nullopt;
}

void Vocabulary::set_doc_frequencies(std::span<const std::uint64_t> df) {
    if (df.size() != entries_.size())
        throw IntegrityError("doc frequency table has " + std::to_string(df.size()) +
                             " entries for a vocabulary of " + std::to_string(entries_.size()));
    for (std::size_t i = 0; i < df.size(); ++i) entries_[i].doc_frequency = df[i];
}

void Vocabulary::validate() const {
    for (const auto& e : entries_)
        if (e.doc_frequency == 0 || e.doc_frequency > total_docs_)
            throw IntegrityError("type '" + e.surface + "' has doc_frequency " +
                                 std::to_string(e.doc_frequency) + " outside (0, " +
                                 std::to_string(total_docs_) + "]");
}

Vocabulary read_vocabulary(const std::filesystem::path& path, std::uint64_t total_docs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary file " + path.string());
    Vocabulary vocab(total_docs);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(std::move(line));
        const auto ctx = path.string() + ":" + std::to_string(lineno);
        const auto f = split(line, '\t');
        if (f.size() != 3) throw FormatError(ctx + ": expected 3 tab-separated fields");
        vocab.add(f[0], parse_u64(f[1], ctx), f[2] == "-" ? std::string{} : f[2]);
    }
    return vocab;
}

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write vocabulary file " + path.string());
    for (const auto& e : vocab.entries())
        out << e.surface << '\t' << e.doc_frequency << '\t' << (e.pos_tag.empty() ? "-" : e.pos_tag) << '\n';
}

// ---- metadata -------------------------------------------------------------

std::vector<DocumentMeta> read_metadata(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metadata file " + path.string());
    std::vector<DocumentMeta> meta;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(std::move(line));
        if (line.empty()) continue;
        const auto ctx = path.string() + ":" + std::to_string(lineno);
        const auto f = split(line, '\t');
        DocumentMeta m;
        const auto id = parse_u64(f[0], ctx);
        if (id > UINT32_MAX) throw FormatError(ctx + ": doc_id out of range");
        m.doc_id = static_cast<std::uint32_t>(id);
        for (std::size_t i = 1; i < f.size(); ++i) {
            const auto eq = f[i].find('=');
            if (eq == std::string::npos || eq == 0)
                throw FormatError(ctx + ": expected name=value, got '" + f[i] + "'");
            m.labels[f[i].substr(0, eq)] = f[i].substr(eq + 1);
        }
        meta.push_back(std::move(m));
    }
    std::sort(meta.begin(), meta.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < meta.size(); ++i)
        if (meta[i].doc_id == meta[i - 1].doc_id)
            throw MetadataError("doc_id " + std::to_string(meta[i].doc_id) + " listed twice in " +
                                path.string());
    return meta;
}

void write_metadata(const std::filesystem::path& path, std::span<const DocumentMeta> meta) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write metadata file " + path.string());
    for (const auto& m : meta) {
        out << m.doc_id;
        for (const auto& [k, v] : m.labels) out << '\t' << k << '=' << v;
        out << '\n';
    }
}

// ---- corpus statistics ----------------------------------------------------

std::vector<std::uint64_t> compute_doc_frequencies(const TokenCorpus& corpus, std::size_t vocab_size) {
    std::vector<std::uint64_t> df(vocab_size, 0);
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto type = corpus.type_ids()[i];
        if (type >= vocab_size)
            throw IntegrityError("type_id " + std::to_string(type) + " outside vocabulary of " +
                                 std::to_string(vocab_size));
        const auto key = (static_cast<std::uint64_t>(corpus.doc_ids()[i]) << 32) | type;
        if (seen.insert(key).second) ++df[type];
    }
    return df;
}

void check_corpus(const TokenCorpus& corpus, std::size_t vocab_size, std::uint64_t doc_count) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus.type_ids()[i] >= vocab_size)
            throw IntegrityError("record " + std::to_string(i) + " has type_id " +
                                 std::to_string(corpus.type_ids()[i]) + " >= vocabulary size " +
                                 std::to_string(vocab_size));
        if (corpus.doc_ids()[i] >= doc_count)
            throw IntegrityError("record " + std::to_string(i) + " has doc_id " +
                                 std::to_string(corpus.doc_ids()[i]) + " >= document count " +
                                 std::to_string(doc_count));
    }
}

}  // namespace tokentopics
