#include "tokentopics/cli.hpp"

#include "commands.hpp"
#include "manifest.hpp"

#include "tokentopics/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>

namespace tokentopics {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool names_option(const std::string& arg, const std::string& flag) {
    return arg == flag || arg.rfind(flag + "=", 0) == 0;
}

// A subcommand's --config FILE holds key=value lines (# comments); every key
// becomes --key=value unless that option already appears on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    auto at = std::find_if(args.begin(), args.end(), [](const auto& a) { return names_option(a, "--config"); });
    if (at == args.end()) return args;
    std::string path;
    if (*at == "--config") {
        if (at + 1 == args.end()) throw UsageError("--config needs a file argument");
        path = *(at + 1);
    } else {
        path = at->substr(9);
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);

    std::vector<std::string> injected;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
        const auto flag = "--" + key;
        if (std::any_of(args.begin(), args.end(), [&](const auto& a) { return names_option(a, flag); })) continue;
        injected.push_back(flag + "=" + value);
    }
    args.insert(at, injected.begin(), injected.end());
    return args;
}

int exit_code_for(const Error& e) {
    const std::string kind = e.kind();
    if (kind == "io" || kind == "format" || kind == "corruption" || kind == "ordering") return 1;
    if (kind == "config" || kind == "policy") return 2;
    return 3;
}

int report(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["exit"] = code;
    j["message"] = message;
    err << j.dump() << std::endl;
    return code;
}

const CLI::App* leaf_of(const CLI::App& app) {
    const CLI::App* at = &app;
    for (;;) {
        const auto subs = at->get_subcommands();
        if (subs.empty()) return at;
        at = subs.front();
    }
}

unsigned threads_from_env() {
    const char* env = std::getenv("TOKENTOPICS_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    unsigned v = 0;
    const std::string s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 1 || v > 4096)
        throw UsageError("TOKENTOPICS_THREADS must be an integer in [1, 4096], got '" + s + "'");
    return v;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    cli::Context ctx{out, err, 1};
    try {
        ctx.threads = threads_from_env();
    } catch (const UsageError& e) {
        return report(err, "usage", e.what(), 2);
    }
    cli::Registry reg;

    CLI::App app("Topic models from contextual token embeddings", "tokentopics");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", cli::tool_version());
    app.add_option("--threads", ctx.threads, "worker threads; default from TOKENTOPICS_THREADS, else 1")
        ->check(CLI::Range(1u, 4096u));

    cli::add_ingest(app, ctx, reg);
    cli::add_filter(app, ctx, reg);
    cli::add_reduce(app, ctx, reg);
    cli::add_cluster(app, ctx, reg);
    cli::add_lda(app, ctx, reg);
    cli::add_topics(app, ctx, reg);
    cli::add_eval(app, ctx, reg);
    cli::add_analyze(app, ctx, reg);
    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) {
        sub->set_help_flag("-h,--help", "print this help and exit");
        sub->add_option("--config", "file of key=value lines for this subcommand's options; flags override it");
        for (auto* leaf : sub->get_subcommands([](CLI::App*) { return true; }))
            leaf->add_option("--config", "file of key=value lines for this subcommand's options; flags override it");
    }

    try {
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report(err, "usage", e.what(), 2);
    } catch (const UsageError& e) {
        return report(err, "usage", e.what(), 2);
    } catch (const Error& e) {
        return report(err, e.kind(), e.what(), exit_code_for(e));
    }

    const auto* action = reg.find(leaf_of(app));
    if (action == nullptr) return report(err, "usage", "no subcommand given", 2);
    try {
        (*action)();
    } catch (const Error& e) {
        return report(err, e.kind(), e.what(), exit_code_for(e));
    } catch (const std::bad_alloc&) {
        return report(err, "memory", "out of memory", 3);
    } catch (const std::exception& e) {
        return report(err, "internal", e.what(), 3);
    }
    return 0;
}

}  // namespace tokentopics
