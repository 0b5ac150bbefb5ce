#include "bubblelator/io/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include "json.hpp"

namespace bubblelator::io {

std::string sha256_hex(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot read " + file.string());

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string RunManifest::json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["config"] = config_path;
    j["out_dir"] = out_dir.string();
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) j["files"].push_back({{"name", f}, {"sha256", sha256_hex(out_dir / f)}});
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    f << json();
}

}  // namespace bubblelator::io
