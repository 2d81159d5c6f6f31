#pragma once

#include <CLI11.hpp>

#include <functional>
#include <map>
#include <ostream>

namespace tokentopics::cli {

struct Context {
    std::ostream& out;
    std::ostream& err;
    unsigned threads = 1;
};

// Leaf subcommand -> work to run once parsing succeeded.
class Registry {
public:
    void add(const CLI::App* sub, std::function<void()> action) { actions_[sub] = std::move(action); }
    const std::function<void()>* find(const CLI::App* sub) const {
        auto it = actions_.find(sub);
        return it == actions_.end() ? nullptr : &it->second;
    }

private:
    std::map<const CLI::App*, std::function<void()>> actions_;
};

void add_ingest(CLI::App& app, Context& ctx, Registry& reg);
void add_filter(CLI::App& app, Context& ctx, Registry& reg);
void add_reduce(CLI::App& app, Context& ctx, Registry& reg);
void add_cluster(CLI::App& app, Context& ctx, Registry& reg);
void add_lda(CLI::App& app, Context& ctx, Registry& reg);
void add_topics(CLI::App& app, Context& ctx, Registry& reg);
void add_eval(CLI::App& app, Context& ctx, Registry& reg);
void add_analyze(CLI::App& app, Context& ctx, Registry& reg);

}  // namespace tokentopics::cli
