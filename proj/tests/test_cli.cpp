#include "doctest.h"

#include "manifest.hpp"
#include "support.hpp"
#include "tokentopics/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using tokentopics::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    ::unsetenv("TOKENTOPICS_THREADS");
    std::ostringstream out, err;
    const int code = tokentopics::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const fs::path kToy = TOKENTOPICS_TOY_DIR;

// ingest + filter + reduce into dir; returns the reduced corpus path
struct Prepared {
    fs::path vocab, filtered, reduced;
};

Prepared prepare(const TempDir& dir) {
    Prepared p{dir / "vocab.tsv", dir / "filtered.tkc", dir / "reduced.tkc"};
    const auto words = (dir / "words.tkc").string();
    REQUIRE(run({"ingest", "--in", (kToy / "corpus.tkc").string(), "--vocab", (kToy / "vocab.tsv").string(), "--meta",
                 (kToy / "meta.tsv").string(), "--out", words, "--vocab-out", p.vocab.string()})
                .code == 0);
    REQUIRE(run({"filter", "--in", words, "--vocab", p.vocab.string(), "--meta", (kToy / "meta.tsv").string(), "--out",
                 p.filtered.string()})
                .code == 0);
    REQUIRE(run({"reduce", "--in", p.filtered.string(), "--dim", "8", "--out", p.reduced.string()}).code == 0);
    return p;
}

nlohmann::json manifest_of(const fs::path& artifact) {
    return nlohmann::json::parse(slurp(tokentopics::cli::manifest_path(artifact)));
}

}  // namespace

TEST_CASE("sha256 matches the standard test vectors") {
    TempDir dir("cli");
    std::ofstream(dir / "abc") << "abc";
    std::ofstream(dir / "empty").flush();
    CHECK(tokentopics::cli::sha256_file(dir / "abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(tokentopics::cli::sha256_file(dir / "empty") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("help lists defaults and usage errors exit with code 2") {
    const auto help = run({"cluster", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--k") != std::string::npos);
    CHECK(help.out.find("[500]") != std::string::npos);
    CHECK(help.out.find("[1000]") != std::string::npos);
    CHECK(help.out.find("[10]") != std::string::npos);
    CHECK(run({"eval", "--help"}).out.find("[25]") != std::string::npos);

    const auto k0 = run({"cluster", "--in", "x.tkc", "--out", "y.tkm", "--k", "0"});
    CHECK(k0.code == 2);
    const auto err = nlohmann::json::parse(k0.err);
    CHECK(err["error"] == "usage");
    CHECK(err["exit"] == 2);
    CHECK(std::count(k0.err.begin(), k0.err.end(), '\n') == 1);

    CHECK(run({}).code == 2);
    CHECK(run({"cluster", "--in", "x", "--out", "y", "--bogus"}).code == 2);
    CHECK(run({"reduce", "--in", "x", "--out", "y", "--method", "lsa"}).code == 2);
    CHECK(run({"reduce", "--in", "x", "--out", "y", "--batch-size", "0"}).code == 2);
    CHECK(run({"analyze"}).code == 2);

    ::setenv("TOKENTOPICS_THREADS", "zero", 1);
    std::ostringstream out, e;
    CHECK(tokentopics::run_cli({"cluster", "--help"}, out, e) == 2);
    ::unsetenv("TOKENTOPICS_THREADS");
}

TEST_CASE("failures map to I/O and integrity exit codes") {
    TempDir dir("cli");
    const auto missing = run({"cluster", "--in", (dir / "none.tkc").string(), "--out", (dir / "m.tkm").string()});
    CHECK(missing.code == 1);
    CHECK(nlohmann::json::parse(missing.err)["error"] == "io");

    std::ofstream(dir / "junk.tkc") << "not a corpus";
    CHECK(run({"cluster", "--in", (dir / "junk.tkc").string(), "--out", (dir / "m.tkm").string()}).code == 1);

    // a model fit on the filtered corpus does not describe the unfiltered one
    const auto p = prepare(dir);
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seeds", "1", "--out", (dir / "m.tkm").string()}).code == 0);
    const auto mismatch = run({"topics", "--model", (dir / "m.tkm").string(), "--corpus",
                               (dir / "words.tkc").string(), "--vocab", p.vocab.string()});
    CHECK(mismatch.code == 3);
    CHECK(nlohmann::json::parse(mismatch.err)["error"] == "integrity");
}

TEST_CASE("same seed gives identical artifacts, across thread counts too") {
    TempDir dir("cli");
    const auto p = prepare(dir);
    const auto a = (dir / "a.tkm").string(), b = (dir / "b.tkm").string(), c = (dir / "c.tkm").string();
    const auto d = (dir / "d.tkm").string();
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seed", "3", "--seeds", "1", "--out", a}).code == 0);
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seed", "3", "--seeds", "1", "--out", b}).code == 0);
    REQUIRE(run({"--threads", "8", "cluster", "--in", p.reduced.string(), "--k", "6", "--seed", "3", "--seeds", "1", "--out", c})
                .code == 0);
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seed", "4", "--seeds", "1", "--out", d}).code == 0);
    const auto digest = [](const std::string& f) { return tokentopics::cli::sha256_file(f); };
    CHECK(digest(a) == digest(b));
    CHECK(digest(a) == digest(c));
    CHECK(manifest_of(a)["artifact"]["sha256"] == digest(a));
    CHECK(manifest_of(c)["parameters"]["threads"] == 8);
    CHECK(manifest_of(d)["seeds"][0] == 4);

    const auto lda1 = (dir / "l1.tkm").string(), lda2 = (dir / "l2.tkm").string();
    REQUIRE(run({"lda", "--in", p.filtered.string(), "--vocab", p.vocab.string(), "--k", "6", "--iters", "30",
                 "--out", lda1})
                .code == 0);
    REQUIRE(run({"--threads", "4", "lda", "--in", p.filtered.string(), "--vocab", p.vocab.string(), "--k", "6",
                 "--iters", "30", "--out", lda2})
                .code == 0);
    CHECK(digest(lda1) == digest(lda2));

    const std::vector<std::string> eval{"eval",   "--model",       a,
                                        lda1,     "--corpus",      p.filtered.string(),
                                        "--vocab", p.vocab.string(), "--reference",
                                        (kToy / "reference.txt").string()};
    auto threaded = eval;
    threaded.insert(threaded.begin(), {"--threads", "8"});
    const auto e1 = run(eval), e8 = run(threaded);
    REQUIRE(e1.code == 0);
    CHECK(e1.out == e8.out);
}

TEST_CASE("the toy pipeline runs end to end") {
    TempDir dir("cli");
    const auto p = prepare(dir);
    const auto m = manifest_of(p.filtered);
    CHECK(m["subcommand"] == "filter");
    CHECK(m["parameters"]["max-doc-frac"] == "0.25");
    CHECK(m["parameters"]["min-docs"] == "5");
    CHECK(m["inputs"][0]["sha256"] == tokentopics::cli::sha256_file(dir / "words.tkc"));
    CHECK(m["summary"]["kept_types"].get<int>() < m["summary"]["types"].get<int>());
    CHECK(m.contains("duration_seconds"));
    CHECK(m["version"] == tokentopics::cli::tool_version());

    const auto km = (dir / "km.tkm").string();
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seeds", "2", "--out", km}).code == 0);
    CHECK(fs::exists(dir / "km.seed0.tkm"));
    CHECK(fs::exists(dir / "km.seed1.tkm"));
    CHECK(fs::exists(dir / "km.seed1.tkm.manifest.json"));
    const auto model = (dir / "km.seed0.tkm").string();

    const auto topics = run({"topics", "--model", model, "--corpus", p.filtered.string(), "--vocab", p.vocab.string(),
                             "--top-n", "5", "--doc-topics", (dir / "docs.tsv").string()});
    REQUIRE(topics.code == 0);
    CHECK(std::count(topics.out.begin(), topics.out.end(), '\n') == 7);
    CHECK(fs::exists(dir / "docs.tsv.manifest.json"));

    const auto ev = run({"eval", "--model", model, "--corpus", p.filtered.string(), "--vocab", p.vocab.string(),
                         "--reference", (kToy / "reference.txt").string(), "--out", (dir / "eval.tsv").string()});
    REQUIRE(ev.code == 0);
    const auto table = slurp(dir / "eval.tsv");
    CHECK(table.rfind("model\ttopic\t", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 7);
    CHECK(table.find("km.seed0\t0\t") != std::string::npos);

    const std::vector<std::string> common{"--model", model, "--corpus", p.filtered.string()};
    auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), common.begin(), common.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return run(head);
    };
    const auto meta = (kToy / "meta.tsv").string();
    CHECK(with({"analyze", "prevalence"}, {"--meta", meta, "--scheme", "venue"}).code == 0);
    CHECK(with({"analyze", "uniform"}, {"--meta", meta, "--scheme", "year"}).code == 0);
    const auto ts = with({"analyze", "timeseries"}, {"--meta", meta, "--sparklines"});
    CHECK(ts.code == 0);
    CHECK(ts.out.find("2009") != std::string::npos);
    CHECK(with({"analyze", "timeseries"}, {"--meta", meta, "--scheme", "venue"}).code == 3);
    const auto poly = with({"analyze", "polysemy"}, {"--vocab", p.vocab.string()});
    CHECK(poly.code == 0);
    CHECK(poly.out.find("\nbank\t") == std::string::npos);  // rank column comes first
    CHECK(poly.out.find("1\tbank\t") != std::string::npos);
    const auto pos = with({"analyze", "pos"}, {"--vocab", p.vocab.string(), "--composition"});
    CHECK(pos.code == 0);
    CHECK(pos.out.find("NOUN\t") != std::string::npos);
}

TEST_CASE("config files fill in options the command line leaves out") {
    TempDir dir("cli");
    const auto p = prepare(dir);
    std::ofstream(dir / "run.cfg") << "# cluster settings\nk = 3\nmax-iter=40\n\nseed=2  # trailing comment\nseeds=1\n";
    const auto out = (dir / "m.tkm").string();
    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--out", out, "--config", (dir / "run.cfg").string()}).code ==
            0);
    auto m = manifest_of(out);
    CHECK(m["parameters"]["k"] == "3");
    CHECK(m["parameters"]["max-iter"] == "40");
    CHECK(m["seeds"][0] == 2);

    REQUIRE(run({"cluster", "--in", p.reduced.string(), "--out", out, "--k", "4", "--config",
                 (dir / "run.cfg").string()})
                .code == 0);
    CHECK(manifest_of(out)["parameters"]["k"] == "4");

    std::ofstream(dir / "bad.cfg") << "clusters=3\n";
    CHECK(run({"cluster", "--in", p.reduced.string(), "--out", out, "--config", (dir / "bad.cfg").string()}).code == 2);
    std::ofstream(dir / "broken.cfg") << "just words\n";
    CHECK(run({"cluster", "--in", p.reduced.string(), "--out", out, "--config", (dir / "broken.cfg").string()}).code ==
          2);
    CHECK(run({"cluster", "--in", p.reduced.string(), "--out", out, "--config", (dir / "none.cfg").string()}).code ==
          1);
}

TEST_CASE("outputs never overwrite inputs") {
    TempDir dir("cli");
    const auto p = prepare(dir);
    const auto before = tokentopics::cli::sha256_file(p.reduced);
    const auto same = run({"cluster", "--in", p.reduced.string(), "--k", "6", "--seeds", "1", "--out",
                           p.reduced.string()});
    CHECK(same.code == 2);
    CHECK(nlohmann::json::parse(same.err)["error"] == "config");
    CHECK(tokentopics::cli::sha256_file(p.reduced) == before);

    // same file through a different spelling
    const auto dotted = (dir / "." / p.filtered.filename()).string();
    CHECK(run({"filter", "--in", p.filtered.string(), "--vocab", p.vocab.string(), "--out", dotted}).code == 2);
    CHECK(run({"ingest", "--in", (kToy / "corpus.tkc").string(), "--vocab", (kToy / "vocab.tsv").string(), "--out",
               (dir / "x.tkc").string(), "--vocab-out", (dir / "x.tkc").string()})
              .code == 2);
    CHECK(run({"topics", "--model", p.reduced.string(), "--corpus", p.filtered.string(), "--vocab",
               p.vocab.string(), "--out", p.vocab.string()})
              .code == 2);
}

TEST_CASE("ingest reports extractor document frequencies that disagree") {
    TempDir dir("cli");
    const auto good = run({"ingest", "--in", (kToy / "corpus.tkc").string(), "--vocab",
                           (kToy / "vocab.tsv").string(), "--out", (dir / "a.tkc").string(), "--vocab-out",
                           (dir / "a.tsv").string()});
    REQUIRE(good.code == 0);
    CHECK(manifest_of(dir / "a.tkc")["summary"]["df_mismatches"] == 0);
    CHECK(good.err.empty());

    // bump the first entry's df by one
    std::istringstream in(slurp(kToy / "vocab.tsv"));
    std::ostringstream edited;
    std::string line;
    for (bool first = true; std::getline(in, line); first = false) {
        if (first) {
            const auto a = line.find('\t'), b = line.find('\t', a + 1);
            line = line.substr(0, a + 1) + std::to_string(std::stoul(line.substr(a + 1, b - a - 1)) + 1) +
                   line.substr(b);
        }
        edited << line << '\n';
    }
    std::ofstream(dir / "v.tsv") << edited.str();
    const auto bad = run({"ingest", "--in", (kToy / "corpus.tkc").string(), "--vocab", (dir / "v.tsv").string(),
                          "--out", (dir / "b.tkc").string(), "--vocab-out", (dir / "b.tsv").string()});
    REQUIRE(bad.code == 0);
    CHECK(manifest_of(dir / "b.tkc")["summary"]["df_mismatches"] == 1);
    CHECK(bad.err.find("warning") != std::string::npos);
    CHECK(slurp(dir / "b.tsv") == slurp(dir / "a.tsv"));
}
