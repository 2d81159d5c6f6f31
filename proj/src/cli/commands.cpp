#include "commands.hpp"

#include "manifest.hpp"

#include "tokentopics/analysis.hpp"
#include "tokentopics/assignment_model.hpp"
#include "tokentopics/cooccurrence.hpp"
#include "tokentopics/corpus.hpp"
#include "tokentopics/dim_reduce.hpp"
#include "tokentopics/errors.hpp"
#include "tokentopics/lda.hpp"
#include "tokentopics/metrics.hpp"
#include "tokentopics/sphere_cluster.hpp"
#include "tokentopics/topic_model.hpp"
#include "tokentopics/vocab_filter.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>

namespace tokentopics::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Values of every option on the path from the root to `leaf`.
json parameters_of(const CLI::App* leaf, const Context& ctx) {
    json j;
    j["threads"] = ctx.threads;
    std::vector<const CLI::App*> chain;
    for (const CLI::App* a = leaf; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) chain.push_back(a);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        for (const CLI::Option* opt : (*it)->get_options()) {
            const auto name = opt->get_single_name();
            if (name == "help" || name == "config") continue;
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? json(r.front()) : json(r);
            } else {
                j[name] = opt->get_default_str();
            }
        }
    }
    return j;
}

RunManifest start(const CLI::App* sub, const Context& ctx) {
    RunManifest m;
    std::string name;
    for (const CLI::App* a = sub; a != nullptr && a->get_parent() != nullptr; a = a->get_parent())
        name = name.empty() ? a->get_name() : a->get_name() + " " + name;
    m.subcommand = name;
    m.parameters = parameters_of(sub, ctx);
    return m;
}

// "-" writes to the context stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (path_ == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path_, std::ios::trunc);
            if (!file_) throw IoError("cannot write " + path_);
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }
    bool is_file() const { return path_ != "-"; }
    fs::path path() const { return path_; }
    void close() {
        if (!is_file()) return;
        file_.close();
        if (!file_) throw IoError("write failed for " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

void finish(Sink& sink, const RunManifest& m) {
    sink.close();
    if (sink.is_file()) write_manifest(sink.path(), m);
}

std::string auto_or_positive(const std::string& s, bool integral) {
    if (s == "auto") return {};
    if (integral) {
        unsigned long long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && p == s.data() + s.size() && v > 0) return {};
        return "must be 'auto' or a positive integer";
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && v > 0) return {};
    } catch (const std::exception&) {
    }
    return "must be 'auto' or a positive number";
}

CLI::Validator at_least_one() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            unsigned long long v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec == std::errc{} && p == s.data() + s.size() && v >= 1) return {};
            return "must be an integer >= 1, got '" + s + "'";
        },
        "INT>=1");
}

CLI::Validator auto_or_count() {
    return CLI::Validator([](std::string& s) { return auto_or_positive(s, true); }, "auto|INT>0");
}

CLI::Validator auto_or_real() {
    return CLI::Validator([](std::string& s) { return auto_or_positive(s, false); }, "auto|NUM>0");
}

std::uint64_t documents_in(const TokenCorpus& corpus, const std::string& meta_path) {
    std::uint64_t n = corpus.document_count();
    if (!meta_path.empty()) {
        const auto meta = read_metadata(meta_path);
        if (!meta.empty()) n = std::max<std::uint64_t>(n, std::uint64_t{meta.back().doc_id} + 1);
    }
    return n;
}

// Model assignments checked against the token stream they describe.
AssignmentModel load_model_for(const fs::path& path, const TokenCorpus& corpus) {
    auto model = read_assignment_model(path);
    if (model.assignments.size() != corpus.size())
        throw IntegrityError("model " + path.string() + " has " + std::to_string(model.assignments.size()) +
                             " assignments but the corpus has " + std::to_string(corpus.size()) + " tokens");
    return model;
}

void check_types(const TokenCorpus& corpus, const Vocabulary& vocab) {
    check_corpus(corpus, vocab.size(), std::max<std::uint64_t>(corpus.document_count(), 1));
}

// Outputs may not overwrite an input or each other.
void check_outputs(const RunManifest& m, const std::vector<fs::path>& outputs) {
    auto same = [](const fs::path& a, const fs::path& b) {
        std::error_code ec;
        if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
        return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
    };
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i] == "-") continue;
        for (const auto& [role, in] : m.inputs)
            if (same(outputs[i], in))
                throw ConfigError("output " + outputs[i].string() + " would overwrite the " + role + " input");
        for (std::size_t j = 0; j < i; ++j)
            if (outputs[j] != "-" && same(outputs[i], outputs[j]))
                throw ConfigError("output " + outputs[i].string() + " is named twice");
    }
}

fs::path with_seed(const fs::path& out, std::uint64_t seed) {
    auto p = out.parent_path() / out.stem();
    p += ".seed" + std::to_string(seed);
    p += out.extension();
    return p;
}

}  // namespace

// ---- ingest ----------------------------------------------------------------

void add_ingest(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("ingest", "Validate extractor output, merge subword rows, recompute document frequencies");
    struct Opts {
        std::string in, vocab, meta, out, vocab_out;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--in", o->in, "token corpus written by the extractor")->required();
    s->add_option("--vocab", o->vocab, "vocabulary TSV (surface, df, POS)")->required();
    s->add_option("--meta", o->meta, "document metadata TSV; sets the document count");
    s->add_option("--out", o->out, "word-level corpus to write")->required();
    s->add_option("--vocab-out", o->vocab_out, "vocabulary with recomputed document frequencies")->required();
    reg.add(s, [&ctx, o, s] {
        auto m = start(s, ctx);
        m.inputs = {{"corpus", o->in}, {"vocab", o->vocab}};
        if (!o->meta.empty()) m.inputs.emplace_back("meta", o->meta);
        check_outputs(m, {o->out, o->vocab_out});

        auto corpus = read_corpus(o->in);
        const auto rows = corpus.size();
        if (corpus.has_subword_groups()) corpus = merge_subwords(corpus);
        const auto total_docs = documents_in(corpus, o->meta);
        auto vocab = read_vocabulary(o->vocab, total_docs);
        check_corpus(corpus, vocab.size(), total_docs);
        const auto df = compute_doc_frequencies(corpus, vocab.size());
        std::size_t df_mismatches = 0;
        for (std::size_t t = 0; t < vocab.size(); ++t) df_mismatches += vocab[t].doc_frequency != df[t];
        if (df_mismatches > 0)
            ctx.err << "warning: " << df_mismatches << " vocabulary document frequencies differ from the corpus; "
                    << "writing recomputed values\n";
        vocab.set_doc_frequencies(df);

        write_corpus(o->out, corpus);
        write_vocabulary(o->vocab_out, vocab);
        m.summary = {{"input_rows", rows}, {"tokens", corpus.size()}, {"documents", total_docs},
                     {"types", vocab.size()}, {"dim", corpus.dim()}, {"df_mismatches", df_mismatches}};
        write_manifest(o->out, m);
        write_manifest(o->vocab_out, m);
    });
}

// ---- filter ----------------------------------------------------------------

void add_filter(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("filter", "Drop word types by document frequency");
    struct Opts {
        std::string in, vocab, meta, out;
        double max_doc_frac = 0.25;
        std::uint64_t min_docs = 5;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--in", o->in, "word-level corpus")->required();
    s->add_option("--vocab", o->vocab, "vocabulary TSV")->required();
    s->add_option("--meta", o->meta, "document metadata TSV; sets the document count");
    s->add_option("--out", o->out, "filtered corpus to write")->required();
    s->add_option("--max-doc-frac", o->max_doc_frac, "drop types found in more than this fraction of documents")
        ->check(CLI::Range(0.0, 1.0));
    s->add_option("--min-docs", o->min_docs, "drop types found in fewer than this many documents");
    reg.add(s, [&ctx, o, s] {
        auto m = start(s, ctx);
        m.inputs = {{"corpus", o->in}, {"vocab", o->vocab}};
        if (!o->meta.empty()) m.inputs.emplace_back("meta", o->meta);
        check_outputs(m, {o->out});

        // pass 1: ids only, for document frequencies
        const auto ids = read_token_ids(o->in);
        const auto total_docs = documents_in(ids, o->meta);
        const auto vocab = read_vocabulary(o->vocab, total_docs);
        check_corpus(ids, vocab.size(), std::max<std::uint64_t>(total_docs, 1));
        const auto df = compute_doc_frequencies(ids, vocab.size());
        const FilterPolicy policy{o->max_doc_frac, o->min_docs};
        policy.validate(total_docs);

        std::vector<bool> keep(vocab.size());
        std::size_t kept_types = 0;
        for (std::size_t t = 0; t < vocab.size(); ++t) {
            keep[t] = df[t] > 0 && policy.keeps(df[t], total_docs);
            kept_types += keep[t];
        }
        if (kept_types == 0) throw PolicyError("the thresholds remove every word type");

        // pass 2: stream the kept records
        CorpusReader reader(o->in);
        CorpusWriter writer(o->out, reader.header().dim, false);
        std::uint64_t kept = 0;
        while (auto r = reader.next()) {
            if (!keep[r->type_id]) continue;
            writer.write(r->doc_id, r->word_index, r->type_id,
                         std::span<const float>(r->vector.data(), static_cast<std::size_t>(r->vector.size())));
            ++kept;
        }
        writer.finish();
        m.summary = {{"documents", total_docs}, {"types", vocab.size()}, {"kept_types", kept_types},
                     {"tokens", ids.size()}, {"kept_tokens", kept}};
        write_manifest(o->out, m);
    });
}

// ---- reduce ----------------------------------------------------------------

void add_reduce(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("reduce", "Project token vectors to a lower dimension (PCA or sparse random projection)");
    struct Opts {
        std::string in, out, model_out, method = "pca", batch = "auto", density = "auto";
        Eigen::Index dim = 100;
        std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--in", o->in, "corpus to reduce")->required();
    s->add_option("--out", o->out, "reduced corpus to write")->required();
    s->add_option("--model-out", o->model_out, "reduction model to write");
    s->add_option("--method", o->method, "pca or srp")->check(CLI::IsMember({"pca", "srp"}));
    s->add_option("--dim", o->dim, "target dimension")->check(at_least_one());
    s->add_option("--batch-size", o->batch, "PCA batch size; auto is five times the input dimension")
        ->check(auto_or_count());
    s->add_option("--srp-density", o->density, "SRP sparsity parameter s; auto is sqrt(input dimension)")
        ->check(auto_or_real());
    s->add_option("--seed", o->seed, "SRP projection seed");
    reg.add(s, [&ctx, o, s] {
        auto m = start(s, ctx);
        m.inputs = {{"corpus", o->in}};
        m.seeds = {o->seed};
        check_outputs(m, o->model_out.empty() ? std::vector<fs::path>{o->out}
                                              : std::vector<fs::path>{o->out, o->model_out});

        ReductionConfig cfg;
        cfg.target_dim = o->dim;
        cfg.method = o->method == "srp" ? ReductionMethod::srp : ReductionMethod::pca;
        cfg.batch_size = o->batch == "auto" ? 0 : static_cast<Eigen::Index>(std::stoull(o->batch));
        cfg.srp_density = o->density == "auto" ? 0.0 : std::stod(o->density);

        const auto header = CorpusReader(o->in).header();
        const Eigen::Index d = header.dim;
        const auto batch = static_cast<std::size_t>(cfg.batch_for(d));

        ReductionModel model;
        if (cfg.method == ReductionMethod::pca) {
            IncrementalPca<double> ipca(d, cfg);
            CorpusReader reader(o->in);
            TokenCorpus chunk(header.dim, header.has_subword_groups);
            while (reader.read_batch(batch, chunk) > 0) {
                ipca.partial_fit(chunk.vectors());
                chunk = TokenCorpus(header.dim, header.has_subword_groups);
            }
            model = ipca.model();
        } else {
            model = fit_srp<double>(d, cfg, o->seed);
        }

        CorpusReader reader(o->in);
        CorpusWriter writer(o->out, static_cast<std::uint32_t>(cfg.target_dim), header.has_subword_groups);
        TokenCorpus chunk(header.dim, header.has_subword_groups);
        while (reader.read_batch(batch, chunk) > 0) {
            const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y =
                std::visit([&](const auto& mdl) { return transform_rows(mdl, chunk.vectors()); }, model)
                    .template cast<float>();
            for (std::size_t i = 0; i < chunk.size(); ++i)
                writer.write(chunk.doc_ids()[i], chunk.word_indices()[i], chunk.type_ids()[i],
                             std::span<const float>(y.row(static_cast<Eigen::Index>(i)).data(),
                                                    static_cast<std::size_t>(y.cols())));
            chunk = TokenCorpus(header.dim, header.has_subword_groups);
        }
        writer.finish();

        m.summary = {{"input_dim", d}, {"output_dim", cfg.target_dim}, {"tokens", header.token_count}};
        if (const auto* pca = std::get_if<PcaModel<double>>(&model)) {
            const double kept = pca->explained_variance.sum();
            m.summary["explained_variance"] = kept;
        } else {
            m.summary["density"] = std::get<SrpModel<double>>(model).density;
        }
        write_manifest(o->out, m);
        if (!o->model_out.empty()) {
            write_reduction_model(o->model_out, model);
            write_manifest(o->model_out, m);
        }
    });
}

// ---- cluster ---------------------------------------------------------------

void add_cluster(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("cluster", "Spherical k-means over token vectors");
    struct Opts {
        std::string in, out, init_trials = "auto";
        std::uint32_t k = 500, seeds = 10, max_iter = 1000;
        std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--in", o->in, "corpus of (reduced) token vectors")->required();
    s->add_option("--out", o->out, "cluster model; with --seeds > 1 each run gets .seed<N> before the extension")
        ->required();
    s->add_option("--k", o->k, "number of clusters")->check(at_least_one());
    s->add_option("--seed", o->seed, "first seed");
    s->add_option("--seeds", o->seeds, "number of runs, seeds seed .. seed+seeds-1")->check(at_least_one());
    s->add_option("--max-iter", o->max_iter, "iteration cap")->check(at_least_one());
    s->add_option("--init-trials", o->init_trials, "candidates per seeding step; auto is 2 + ln K, 1 is plain k-means++")
        ->check(auto_or_count());
    reg.add(s, [&ctx, o, s] {
        {
            RunManifest probe;
            probe.inputs = {{"corpus", o->in}};
            std::vector<fs::path> outs;
            for (std::uint32_t r = 0; r < o->seeds; ++r)
                outs.push_back(o->seeds == 1 ? fs::path(o->out) : with_seed(o->out, o->seed + r));
            check_outputs(probe, outs);
        }
        const auto corpus = read_corpus(o->in);
        ClusterOptions opt;
        opt.max_iter = o->max_iter;
        opt.threads = ctx.threads;
        opt.init_trials = o->init_trials == "auto" ? 0u : static_cast<unsigned>(std::stoul(o->init_trials));
        for (std::uint32_t r = 0; r < o->seeds; ++r) {
            auto m = start(s, ctx);
            m.inputs = {{"corpus", o->in}};
            opt.seed = o->seed + r;
            m.seeds = {opt.seed};
            const auto fitted = fit<double>(corpus.vectors(), o->k, opt);
            const fs::path out = o->seeds == 1 ? fs::path(o->out) : with_seed(o->out, opt.seed);
            write_assignment_model(out, to_assignment_model(fitted));
            m.summary = {{"objective", fitted.objective}, {"iterations", fitted.iterations_run},
                         {"converged", fitted.converged}, {"tokens", corpus.size()}};
            write_manifest(out, m);
        }
    });
}

// ---- lda -------------------------------------------------------------------

void add_lda(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("lda", "Collapsed Gibbs LDA baseline over the same tokens");
    struct Opts {
        std::string in, vocab, out, alpha = "auto";
        std::uint32_t k = 100, iters = 1000;
        double beta = 0.01;
        std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--in", o->in, "filtered corpus")->required();
    s->add_option("--vocab", o->vocab, "vocabulary TSV")->required();
    s->add_option("--out", o->out, "LDA model to write")->required();
    s->add_option("--k", o->k, "number of topics")->check(at_least_one());
    s->add_option("--alpha", o->alpha, "document-topic prior; auto is 5/K")->check(auto_or_real());
    s->add_option("--beta", o->beta, "topic-word prior")->check(CLI::PositiveNumber);
    s->add_option("--iters", o->iters, "Gibbs sweeps")->check(at_least_one());
    s->add_option("--seed", o->seed, "sampler seed");
    reg.add(s, [&ctx, o, s] {
        auto m = start(s, ctx);
        m.inputs = {{"corpus", o->in}, {"vocab", o->vocab}};
        m.seeds = {o->seed};
        check_outputs(m, {o->out});
        const auto ids = read_token_ids(o->in);
        const auto vocab = read_vocabulary(o->vocab);
        LdaOptions opt;
        opt.alpha = o->alpha == "auto" ? 0.0 : std::stod(o->alpha);
        opt.beta = o->beta;
        opt.iterations = o->iters;
        opt.seed = o->seed;
        const auto state =
            gibbs_fit(ids.doc_ids(), ids.type_ids(), static_cast<std::uint32_t>(vocab.size()), o->k, opt);
        write_assignment_model(o->out, to_assignment_model(state));
        m.summary = {{"alpha", state.alpha}, {"beta", state.beta}, {"vocab_in_use", state.vocab_in_use},
                     {"tokens", ids.size()}};
        write_manifest(o->out, m);
    });
}

// ---- topics ----------------------------------------------------------------

void add_topics(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("topics", "Word distributions and top words per topic");
    struct Opts {
        std::string model, corpus, vocab, out = "-", doc_topics;
        std::size_t top_n = 20;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--model", o->model, "cluster or LDA model")->required();
    s->add_option("--corpus", o->corpus, "corpus the model was fit on")->required();
    s->add_option("--vocab", o->vocab, "vocabulary TSV")->required();
    s->add_option("--top-n", o->top_n, "words listed per topic")->check(at_least_one());
    s->add_option("--out", o->out, "topic table; - for stdout");
    s->add_option("--doc-topics", o->doc_topics, "also write per-document topic proportions here");
    reg.add(s, [&ctx, o, s] {
        auto m = start(s, ctx);
        m.inputs = {{"model", o->model}, {"corpus", o->corpus}, {"vocab", o->vocab}};
        check_outputs(m, o->doc_topics.empty() ? std::vector<fs::path>{o->out}
                                               : std::vector<fs::path>{o->out, o->doc_topics});
        const auto ids = read_token_ids(o->corpus);
        const auto vocab = read_vocabulary(o->vocab);
        check_types(ids, vocab);
        const auto model = load_model_for(o->model, ids);
        m.seeds = {model.seed};
        const auto topics = summarize(model.assignments, ids, model.num_topics, o->top_n);
        Sink sink(o->out, ctx.out);
        write_topic_summaries(*sink, topics, vocab);
        finish(sink, m);
        if (!o->doc_topics.empty()) {
            Sink rows(o->doc_topics, ctx.out);
            write_doc_topics(*rows, doc_topic_matrix(model.assignments, ids.doc_ids(), model.num_topics,
                                                     ids.document_count()));
            finish(rows, m);
        }
    });
}

// ---- eval ------------------------------------------------------------------

void add_eval(CLI::App& app, Context& ctx, Registry& reg) {
    auto* s = app.add_subcommand("eval", "Coherence, entropy and exclusivity per topic");
    struct Opts {
        std::vector<std::string> models;
        std::string corpus, vocab, reference, out = "-";
        CoherenceConfig cfg;
    };
    auto o = std::make_shared<Opts>();
    s->add_option("--model", o->models, "one or more models; each is reported under its file stem")->required();
    s->add_option("--corpus", o->corpus, "corpus the models were fit on")->required();
    s->add_option("--vocab", o->vocab, "vocabulary TSV")->required();
    s->add_option("--reference", o->reference, "reference text, one document per line, for external coherence");
    s->add_option("--top-n", o->cfg.top_n, "top words per topic")->check(at_least_one());
    s->add_option("--epsilon", o->cfg.epsilon, "smoothing added to co-occurrence counts")->check(CLI::PositiveNumber);
    s->add_option("--window", o->cfg.window, "reference sliding-window length")->check(CLI::Range(2, 1 << 20));
    s->add_option("--min-attested", o->cfg.min_attested,
                  "external coherence is skipped with fewer attested top words");
    s->add_option("--out", o->out, "metric table; - for stdout");
    reg.add(s, [&ctx, o, s] {
        o->cfg.validate();
        auto m = start(s, ctx);
        for (const auto& p : o->models) m.inputs.emplace_back("model", p);
        m.inputs.emplace_back("corpus", o->corpus);
        m.inputs.emplace_back("vocab", o->vocab);
        if (!o->reference.empty()) m.inputs.emplace_back("reference", o->reference);
        check_outputs(m, {o->out});

        const auto ids = read_token_ids(o->corpus);
        const auto vocab = read_vocabulary(o->vocab);
        check_types(ids, vocab);
        const auto docs = documents_of(ids);
        std::optional<TokenizedDocuments> reference;
        if (!o->reference.empty()) reference = read_reference_corpus(o->reference, vocab);

        Sink sink(o->out, ctx.out);
        write_metric_header(*sink);
        for (const auto& path : o->models) {
            const auto model = load_model_for(path, ids);
            m.seeds.push_back(model.seed);
            const auto topics = summarize(model.assignments, ids, model.num_topics, o->cfg.top_n);
            const auto watched = watched_words(topics, o->cfg.top_n);
            const auto doc_counts = CooccurrenceCounts::documents(docs, watched, ctx.threads);
            std::optional<CooccurrenceCounts> windows;
            if (reference) windows = CooccurrenceCounts::windows(*reference, watched, o->cfg.window, ctx.threads);
            const auto rows = evaluate_topics(topics, doc_counts, windows ? &*windows : nullptr, o->cfg);
            write_metric_rows(*sink, fs::path(path).stem().string(), rows);
        }
        finish(sink, m);
    });
}

// ---- analyze ---------------------------------------------------------------

namespace {

struct AnalyzeInputs {
    std::string model, corpus, out = "-";
};

void add_analyze_inputs(CLI::App* s, AnalyzeInputs& in) {
    s->add_option("--model", in.model, "cluster or LDA model")->required();
    s->add_option("--corpus", in.corpus, "corpus the model was fit on")->required();
    s->add_option("--out", in.out, "result table; - for stdout");
}

struct Loaded {
    TokenCorpus ids;
    AssignmentModel model;
};

Loaded load(const AnalyzeInputs& in, RunManifest& m) {
    m.inputs = {{"model", in.model}, {"corpus", in.corpus}};
    Loaded l;
    l.ids = read_token_ids(in.corpus);
    l.model = load_model_for(in.model, l.ids);
    m.seeds = {l.model.seed};
    return l;
}

PartitionTable partition(const Loaded& l, const std::string& meta_path, const std::string& scheme, RunManifest& m) {
    m.inputs.emplace_back("meta", meta_path);
    const auto meta = read_metadata(meta_path);
    return partition_prevalence(l.model.assignments, l.ids.doc_ids(), meta, scheme, l.model.num_topics);
}

}  // namespace

void add_analyze(CLI::App& app, Context& ctx, Registry& reg) {
    auto* a = app.add_subcommand("analyze", "Metadata and linguistic analyses of a fitted model");
    a->require_subcommand(1);

    {
        auto* s = a->add_subcommand("prevalence", "Most prominent topics under each label of a metadata scheme");
        struct Opts : AnalyzeInputs {
            std::string meta, scheme;
            std::size_t top_m = 10;
            bool table = false;
        };
        auto o = std::make_shared<Opts>();
        add_analyze_inputs(s, *o);
        s->add_option("--meta", o->meta, "document metadata TSV")->required();
        s->add_option("--scheme", o->scheme, "metadata field to partition by")->required();
        s->add_option("--top-m", o->top_m, "topics listed per label")->check(at_least_one());
        s->add_flag("--table", o->table, "print the full topic x label count table instead");
        reg.add(s, [&ctx, o, s] {
            auto m = start(s, ctx);
            const auto l = load(*o, m);
            const auto t = partition(l, o->meta, o->scheme, m);
            check_outputs(m, {o->out});
            Sink sink(o->out, ctx.out);
            auto& out = *sink;
            if (o->table) {
                out << "topic";
                for (const auto& label : t.labels) out << '\t' << label;
                out << "\ttotal\n";
                for (Eigen::Index z = 0; z < t.counts.rows(); ++z) {
                    out << z;
                    for (Eigen::Index c = 0; c < t.counts.cols(); ++c) out << '\t' << t.counts(z, c);
                    out << '\t' << t.topic_total(z) << '\n';
                }
            } else {
                out << "label\trank\ttopic\ttokens\tshare\n";
                for (Eigen::Index c = 0; c < t.counts.cols(); ++c) {
                    const auto total = static_cast<double>(t.label_total(c));
                    std::size_t rank = 0;
                    for (const auto& [z, n] : prominent_topics(t, c, o->top_m))
                        out << t.labels[static_cast<std::size_t>(c)] << '\t' << ++rank << '\t' << z << '\t' << n
                            << '\t' << num(total > 0 ? static_cast<double>(n) / total : 0.0) << '\n';
                }
            }
            finish(sink, m);
        });
    }

    {
        auto* s = a->add_subcommand("uniform", "Topics spread most evenly across the labels of a scheme");
        struct Opts : AnalyzeInputs {
            std::string meta, scheme;
            std::size_t top_m = 10;
        };
        auto o = std::make_shared<Opts>();
        add_analyze_inputs(s, *o);
        s->add_option("--meta", o->meta, "document metadata TSV")->required();
        s->add_option("--scheme", o->scheme, "metadata field to partition by")->required();
        s->add_option("--top-m", o->top_m, "topics listed")->check(at_least_one());
        reg.add(s, [&ctx, o, s] {
            auto m = start(s, ctx);
            const auto l = load(*o, m);
            const auto t = partition(l, o->meta, o->scheme, m);
            check_outputs(m, {o->out});
            Sink sink(o->out, ctx.out);
            *sink << "rank\ttopic\tentropy\ttokens\n";
            std::size_t rank = 0;
            for (const auto& r : uniform_topics(t, o->top_m))
                *sink << ++rank << '\t' << r.topic_id << '\t' << num(r.score) << '\t' << t.topic_total(r.topic_id)
                      << '\n';
            finish(sink, m);
        });
    }

    {
        auto* s = a->add_subcommand("timeseries", "Topic prevalence over an ordered numeric label such as year");
        struct Opts : AnalyzeInputs {
            std::string meta, scheme = "year", normalize = "per-label";
            bool sparklines = false;
        };
        auto o = std::make_shared<Opts>();
        add_analyze_inputs(s, *o);
        s->add_option("--meta", o->meta, "document metadata TSV")->required();
        s->add_option("--scheme", o->scheme, "numeric metadata field");
        s->add_option("--normalize", o->normalize, "none (raw counts) or per-label (share of each label's tokens)")
            ->check(CLI::IsMember({"none", "per-label"}));
        s->add_flag("--sparklines", o->sparklines, "append a sparkline column");
        reg.add(s, [&ctx, o, s] {
            auto m = start(s, ctx);
            const auto l = load(*o, m);
            const auto t = partition(l, o->meta, o->scheme, m);
            const auto ts = time_series(t, o->normalize == "none" ? SeriesNormalization::none
                                                                  : SeriesNormalization::per_label);
            check_outputs(m, {o->out});
            Sink sink(o->out, ctx.out);
            auto& out = *sink;
            out << "topic\tmean_position";
            for (const auto& label : ts.labels) out << '\t' << label;
            if (o->sparklines) out << "\tsparkline";
            out << '\n';
            for (const auto& r : ts.order) {
                out << r.topic_id << '\t' << num(r.score);
                const auto row = ts.series.row(r.topic_id);
                for (Eigen::Index c = 0; c < row.size(); ++c) out << '\t' << num(row(c));
                if (o->sparklines) out << '\t' << sparkline(row.transpose());
                out << '\n';
            }
            finish(sink, m);
        });
    }

    {
        auto* s = a->add_subcommand("polysemy", "Word types among the top words of several dissimilar topics");
        struct Opts : AnalyzeInputs {
            std::string vocab;
            std::size_t top_n = 20, limit = 0;
        };
        auto o = std::make_shared<Opts>();
        add_analyze_inputs(s, *o);
        s->add_option("--vocab", o->vocab, "vocabulary TSV")->required();
        s->add_option("--top-n", o->top_n, "top words per topic")->check(at_least_one());
        s->add_option("--limit", o->limit, "rows to print; 0 prints all");
        reg.add(s, [&ctx, o, s] {
            auto m = start(s, ctx);
            const auto l = load(*o, m);
            m.inputs.emplace_back("vocab", o->vocab);
            const auto vocab = read_vocabulary(o->vocab);
            check_types(l.ids, vocab);
            const auto topics = summarize(l.model.assignments, l.ids, l.model.num_topics, o->top_n);
            auto cands = polysemy_candidates(topics, o->top_n);
            if (o->limit > 0 && cands.size() > o->limit) cands.resize(o->limit);
            check_outputs(m, {o->out});
            Sink sink(o->out, ctx.out);
            *sink << "rank\tword\ttopic_a\ttopic_b\tjsd\n";
            std::size_t rank = 0;
            for (const auto& c : cands)
                *sink << ++rank << '\t' << vocab[c.type_id].surface << '\t' << c.topic_a << '\t' << c.topic_b << '\t'
                      << num(c.jsd) << '\n';
            finish(sink, m);
        });
    }

    {
        auto* s = a->add_subcommand("pos", "Part-of-speech entropy of each topic's top words");
        struct Opts : AnalyzeInputs {
            std::string vocab;
            std::size_t top_n = 20;
            bool composition = false;
        };
        auto o = std::make_shared<Opts>();
        add_analyze_inputs(s, *o);
        s->add_option("--vocab", o->vocab, "vocabulary TSV with POS tags")->required();
        s->add_option("--top-n", o->top_n, "top words per topic")->check(at_least_one());
        s->add_flag("--composition", o->composition, "print the tag share over all top-word slots instead");
        reg.add(s, [&ctx, o, s] {
            auto m = start(s, ctx);
            const auto l = load(*o, m);
            m.inputs.emplace_back("vocab", o->vocab);
            const auto vocab = read_vocabulary(o->vocab);
            check_types(l.ids, vocab);
            const auto topics = summarize(l.model.assignments, l.ids, l.model.num_topics, o->top_n);
            check_outputs(m, {o->out});
            Sink sink(o->out, ctx.out);
            if (o->composition) {
                *sink << "tag\tfraction\n";
                for (const auto& [tag, f] : pos_composition(topics, vocab, o->top_n))
                    *sink << tag << '\t' << num(f) << '\n';
            } else {
                *sink << "topic\ttokens\tpos_entropy\n";
                for (const auto& t : topics) {
                    if (t.empty()) continue;
                    *sink << t.topic_id << '\t' << t.total_tokens << '\t' << num(pos_entropy(t, vocab, o->top_n))
                          << '\n';
                }
            }
            finish(sink, m);
        });
    }
}

}  // namespace tokentopics::cli
