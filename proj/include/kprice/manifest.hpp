#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace kprice {

const char* tool_version();

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

// Provenance record written next to every CLI output: the exact command,
// parameters, seed, tool version, and a digest per produced file. Re-running
// the command must reproduce the digests.
struct RunManifest {
    std::string command;
    nlohmann::json parameters;
    std::optional<unsigned long long> seed;
    std::map<std::string, std::string> outputs;

    void add_output(const std::string& path) { outputs[path] = sha256_file(path); }
    nlohmann::json to_json() const;
    void write(const std::string& path) const;
};

} // namespace kprice
