#include "manifest.hpp"

#include "tokentopics/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#ifndef TOKENTOPICS_VERSION
#define TOKENTOPICS_VERSION "0.0.0"
#endif

namespace tokentopics::cli {

const char* tool_version() { return TOKENTOPICS_VERSION; }

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoError("read failed while hashing " + path.string());
    std::array<unsigned char, EVP_MAX_MD_SIZE> md;
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
    auto p = artifact;
    p += ".manifest.json";
    return p;
}

void write_manifest(const std::filesystem::path& artifact, const RunManifest& m) {
    using json = nlohmann::ordered_json;
    json j;
    j["tool"] = "tokentopics";
    j["version"] = tool_version();
    j["subcommand"] = m.subcommand;
    j["parameters"] = m.parameters;
    j["inputs"] = json::array();
    for (const auto& [role, path] : m.inputs)
        j["inputs"].push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_file(path)}});
    j["seeds"] = m.seeds;
    j["artifact"] = {{"path", artifact.string()}, {"sha256", sha256_file(artifact)}};
    if (!m.summary.empty()) j["summary"] = m.summary;
    j["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - m.started).count();

    const auto path = manifest_path(artifact);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for manifest " + path.string());
}

}  // namespace tokentopics::cli
