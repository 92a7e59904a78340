#pragma once

// Flat "key = value" run configuration and run manifests with SHA-256
// digests of the configuration and every input file.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"

namespace cmforge {

inline constexpr const char* kVersion = "0.1.0";

/// Grammar: one "key = value" per line; '#' starts a comment line; keys are
/// [a-z0-9_.-]+ and may repeat, the last one wins. Values run to end of line
/// with surrounding spaces trimmed.
class RunConfig {
public:
    static RunConfig parse(std::istream& in)
    {
        RunConfig c;
        std::string line;
        std::size_t lineno = 0;
        auto trim = [](const std::string& s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        while (std::getline(in, line)) {
            ++lineno;
            detail::strip_cr(line);
            auto t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos) throw parse_error(lineno, "expected 'key = value'");
            auto key = trim(t.substr(0, eq));
            if (key.empty()) throw parse_error(lineno, "empty key");
            for (char ch : key)
                if (!(std::islower(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch)) ||
                      ch == '_' || ch == '.' || ch == '-'))
                    throw parse_error(lineno, "bad key '" + key + "'");
            c.values_[key] = trim(t.substr(eq + 1));
        }
        return c;
    }

    static RunConfig load(const std::string& path)
    {
        auto in = detail::open_input(path);
        try {
            return parse(in);
        } catch (const parse_error& e) {
            throw input_error(path + ": " + e.what());
        }
    }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Sorted "key=value" lines; the basis of the configuration hash.
    std::string canonical() const
    {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }

private:
    std::map<std::string, std::string> values_;
};

namespace detail {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new())
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

    std::string hex()
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace detail

inline std::string sha256_hex(std::string_view data)
{
    detail::Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

inline std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    detail::Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

inline std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string subcommand;
    std::string config_hash;
    std::map<std::string, std::string> inputs;  // path -> sha256
    std::map<std::string, std::string> outputs;
    std::string version = kVersion;
    std::string started;
    std::string finished;
    RunConfig config;

    void add_input(const std::string& path) { inputs[path] = sha256_file(path); }
    void add_output(const std::string& path) { outputs[path] = sha256_file(path); }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["version"] = version;
        j["config_hash"] = config_hash;
        j["config"] = config.values();
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["started"] = started;
        j["finished"] = finished;
        return j;
    }

    void write(const std::string& path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw input_error("cannot write '" + path + "'");
        out << to_json().dump(2) << '\n';
    }
};

inline RunManifest begin_manifest(const std::string& subcommand, const RunConfig& config)
{
    RunManifest m;
    m.subcommand = subcommand;
    m.config = config;
    m.config_hash = sha256_hex(subcommand + "\n" + config.canonical());
    m.started = utc_timestamp();
    return m;
}

}  // namespace cmforge
