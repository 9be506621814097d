#include "wxmood/app/manifest.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "wxmood/errors.hpp"

namespace wxmood::app {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("SHA-256 initialisation failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_, md.data(), &len);
        std::string out;
        for (unsigned i = 0; i < len; ++i)
            out += fmt::format("{:02x}", md[i]);
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

} // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError(fmt::format("cannot open '{}' for hashing", path.string()));
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

FileDigest digest(const std::filesystem::path& root, const std::filesystem::path& relative) {
    return {relative.generic_string(), sha256_file(root / relative)};
}

std::string manifest_json(const Manifest& m) {
    auto list = [](const std::vector<FileDigest>& files) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& f : files)
            arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
        return arr;
    };
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["parameters"] = m.parameters;
    j["inputs"] = list(m.inputs);
    j["artifacts"] = nlohmann::ordered_json::object();
    for (const auto& [name, files] : m.artifacts)
        j["artifacts"][name] = list(files);
    j["auxiliary"] = list(m.auxiliary);
    return j.dump(2) + "\n";
}

} // namespace wxmood::app
