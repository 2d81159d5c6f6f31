#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tokentopics::cli {

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to every artifact as <artifact>.manifest.json.
struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::filesystem::path>> inputs;  // role, path
    std::vector<std::uint64_t> seeds;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

std::filesystem::path manifest_path(const std::filesystem::path& artifact);

void write_manifest(const std::filesystem::path& artifact, const RunManifest& m);

const char* tool_version();

}  // namespace tokentopics::cli
