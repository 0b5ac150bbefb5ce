#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bubblelator::io {

std::string sha256_hex(const std::filesystem::path& file);

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::string config_path;
    std::filesystem::path out_dir;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::string> files;  // relative to out_dir

    std::string json() const;  // checksums computed on the fly
    void write(const std::filesystem::path& path) const;
};

}  // namespace bubblelator::io
