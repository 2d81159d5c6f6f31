// Writes a small synthetic collection in the extractor's output format:
// corpus.tkc (subword rows), vocab.tsv, meta.tsv and reference.txt.
//
// Six themes, each a cloud of word vectors around its own direction.
// "bank" has one sense vector near the river theme and one near finance.
// A handful of function words occur in every document and a few rare
// words in almost none, so the document-frequency filter has work to do.

#include "tokentopics/corpus.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>

namespace fs = std::filesystem;
using namespace tokentopics;

namespace {

struct Word {
    std::string surface;
    std::string pos;
};

const std::vector<std::vector<Word>> kThemes = {
    {{"river", "NOUN"}, {"water", "NOUN"}, {"shore", "NOUN"}, {"fish", "NOUN"}, {"boat", "NOUN"},
     {"stream", "NOUN"}, {"flood", "NOUN"}, {"mud", "NOUN"}, {"swim", "VERB"}, {"flow", "VERB"},
     {"drift", "VERB"}, {"wet", "ADJ"}},
    {{"money", "NOUN"}, {"loan", "NOUN"}, {"credit", "NOUN"}, {"interest", "NOUN"}, {"deposit", "NOUN"},
     {"account", "NOUN"}, {"cash", "NOUN"}, {"market", "NOUN"}, {"pay", "VERB"}, {"invest", "VERB"},
     {"borrow", "VERB"}, {"rich", "ADJ"}},
    {{"song", "NOUN"}, {"guitar", "NOUN"}, {"melody", "NOUN"}, {"band", "NOUN"}, {"concert", "NOUN"},
     {"rhythm", "NOUN"}, {"album", "NOUN"}, {"choir", "NOUN"}, {"sing", "VERB"}, {"play", "VERB"},
     {"listen", "VERB"}, {"loud", "ADJ"}},
    {{"team", "NOUN"}, {"match", "NOUN"}, {"goal", "NOUN"}, {"player", "NOUN"}, {"coach", "NOUN"},
     {"score", "NOUN"}, {"season", "NOUN"}, {"league", "NOUN"}, {"win", "VERB"}, {"run", "VERB"},
     {"kick", "VERB"}, {"fast", "ADJ"}},
    {{"bread", "NOUN"}, {"oven", "NOUN"}, {"flour", "NOUN"}, {"salt", "NOUN"}, {"soup", "NOUN"},
     {"recipe", "NOUN"}, {"kitchen", "NOUN"}, {"butter", "NOUN"}, {"bake", "VERB"}, {"cook", "VERB"},
     {"stir", "VERB"}, {"sweet", "ADJ"}},
    {{"rain", "NOUN"}, {"cloud", "NOUN"}, {"storm", "NOUN"}, {"wind", "NOUN"}, {"snow", "NOUN"},
     {"sun", "NOUN"}, {"fog", "NOUN"}, {"thunder", "NOUN"}, {"freeze", "VERB"}, {"blow", "VERB"},
     {"shine", "VERB"}, {"cold", "ADJ"}},
};
const std::vector<Word> kFunction = {{"the", "DET"}, {"of", "ADP"}, {"and", "CCONJ"}, {"a", "DET"}, {"to", "ADP"}};
const std::vector<Word> kRare = {{"zephyr", "NOUN"}, {"obelisk", "NOUN"}, {"quixotic", "ADJ"}};

Eigen::VectorXf unit(Eigen::VectorXf v) { return v / v.norm(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Generate the bundled toy collection", "make_toy_corpus");
    app.option_defaults()->always_capture_default();
    std::string out_dir = "data/toy";
    std::uint32_t docs = 300, tokens_per_doc = 30, dim = 16;
    std::uint64_t seed = 7;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--docs", docs, "documents")->check(CLI::Range(20u, 100000u));
    app.add_option("--tokens", tokens_per_doc, "words per document")->check(CLI::Range(10u, 10000u));
    app.add_option("--dim", dim, "embedding dimension")->check(CLI::Range(4u, 4096u));
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 gen(seed);
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto gaussian = [&](std::uint32_t n) {
        Eigen::VectorXf v(n);
        for (std::uint32_t i = 0; i < n; ++i) v(i) = normal(gen);
        return v;
    };

    // vocabulary: themes, then bank, then function words, then rare words
    std::vector<Word> words;
    std::vector<int> theme_of;
    for (std::size_t t = 0; t < kThemes.size(); ++t)
        for (const auto& w : kThemes[t]) {
            words.push_back(w);
            theme_of.push_back(static_cast<int>(t));
        }
    const auto bank = static_cast<std::uint32_t>(words.size());
    words.push_back({"bank", "NOUN"});
    theme_of.push_back(-1);
    const auto first_function = static_cast<std::uint32_t>(words.size());
    for (const auto& w : kFunction) {
        words.push_back(w);
        theme_of.push_back(-1);
    }
    const auto first_rare = static_cast<std::uint32_t>(words.size());
    for (const auto& w : kRare) {
        words.push_back(w);
        theme_of.push_back(-1);
    }

    std::vector<Eigen::VectorXf> centre(kThemes.size());
    for (auto& c : centre) c = unit(gaussian(dim));
    std::vector<Eigen::VectorXf> sense(words.size());
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (theme_of[w] >= 0)
            sense[w] = unit(centre[static_cast<std::size_t>(theme_of[w])] + 0.25f * unit(gaussian(dim)));
        else
            sense[w] = unit(gaussian(dim));
    }
    const Eigen::VectorXf bank_river = unit(centre[0] + 0.25f * unit(gaussian(dim)));
    const Eigen::VectorXf bank_money = unit(centre[1] + 0.25f * unit(gaussian(dim)));

    fs::create_directories(out_dir);
    CorpusWriter writer(fs::path(out_dir) / "corpus.tkc", dim, true);
    std::vector<std::set<std::uint32_t>> seen(words.size());
    std::vector<DocumentMeta> meta;
    const std::vector<std::string> venues = {"journal", "conference", "workshop"};

    auto emit = [&](std::uint32_t d, std::uint32_t pos, std::uint32_t type, const Eigen::VectorXf& base) {
        const Eigen::VectorXf v = base + 0.05f * gaussian(dim);
        if (words[type].surface.size() >= 6) {
            // two subword rows that average back to v
            const Eigen::VectorXf delta = 0.1f * gaussian(dim);
            const Eigen::VectorXf a = v + delta, b = v - delta;
            writer.write(d, pos, type, std::span<const float>(a.data(), dim));
            writer.write(d, pos, type, std::span<const float>(b.data(), dim));
        } else {
            writer.write(d, pos, type, std::span<const float>(v.data(), dim));
        }
        seen[type].insert(d);
    };

    for (std::uint32_t d = 0; d < docs; ++d) {
        const std::uint32_t year = 2000 + d % 10;
        // music gains ground over the decade, river loses it
        std::vector<double> weight = {4.0 - 0.3 * (year - 2000), 3.0, 1.0 + 0.3 * (year - 2000), 3.0, 3.0, 3.0};
        std::discrete_distribution<int> pick(weight.begin(), weight.end());
        const int main_theme = pick(gen);
        int second = pick(gen);
        if (second == main_theme) second = (main_theme + 1) % static_cast<int>(kThemes.size());

        DocumentMeta m;
        m.doc_id = d;
        m.labels["year"] = std::to_string(year);
        m.labels["venue"] = venues[d % venues.size()];
        meta.push_back(m);

        std::uniform_int_distribution<std::size_t> in_theme(0, 11), function(0, kFunction.size() - 1);
        for (std::uint32_t pos = 0; pos < tokens_per_doc; ++pos) {
            const double u = uniform(gen);
            if (u < 0.2) {
                const auto t = first_function + static_cast<std::uint32_t>(function(gen));
                emit(d, pos, t, sense[t]);
            } else if (u < 0.22 && main_theme <= 1) {
                emit(d, pos, bank, main_theme == 0 ? bank_river : bank_money);
            } else {
                const int theme = uniform(gen) < 0.85 ? main_theme : second;
                const auto t = static_cast<std::uint32_t>(theme * 12 + static_cast<int>(in_theme(gen)));
                emit(d, pos, t, sense[t]);
            }
        }
        if (d % 97 == 5) emit(d, tokens_per_doc, first_rare + (d / 97) % 3, sense[first_rare + (d / 97) % 3]);
    }
    writer.finish();

    {
        std::ofstream v(fs::path(out_dir) / "vocab.tsv");
        for (std::size_t w = 0; w < words.size(); ++w)
            v << words[w].surface << '\t' << std::max<std::size_t>(seen[w].size(), 1) << '\t' << words[w].pos << '\n';
    }
    write_metadata(fs::path(out_dir) / "meta.tsv", meta);

    // reference text: shorter single-theme paragraphs
    {
        std::ofstream r(fs::path(out_dir) / "reference.txt");
        std::uniform_int_distribution<int> theme(0, static_cast<int>(kThemes.size()) - 1);
        std::uniform_int_distribution<std::size_t> in_theme(0, 11);
        for (std::uint32_t line = 0; line < docs; ++line) {
            const int t = theme(gen);
            for (int i = 0; i < 30; ++i) {
                if (i > 0) r << ' ';
                if (uniform(gen) < 0.15)
                    r << kFunction[static_cast<std::size_t>(i) % kFunction.size()].surface;
                else if (t <= 1 && uniform(gen) < 0.05)
                    r << "bank";
                else
                    r << kThemes[static_cast<std::size_t>(t)][in_theme(gen)].surface;
            }
            r << '\n';
        }
    }
    std::cout << "wrote " << out_dir << '\n';
    return 0;
}
