#include "atlas/io.hpp"

#include <cstdio>
#include <fstream>

#include "atlas/errors.hpp"

namespace fs = std::filesystem;

namespace atlas {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::string body = header;
    body.push_back('\n');
    for (const std::vector<double>& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) body.push_back(',');
            body += g17(row[i]);
        }
        body.push_back('\n');
    }
    write_text(path, body);
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string() + " for digest");
    std::uint64_t hash = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

StagedOutput::StagedOutput(fs::path target) : target_(std::move(target)) {
    staging_ = target_;
    staging_ += ".staging";
    std::error_code ec;
    fs::remove_all(staging_, ec);
    fs::create_directories(staging_);
}

StagedOutput::~StagedOutput() {
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

fs::path StagedOutput::path(const std::string& name) const { return staging_ / name; }

void StagedOutput::commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::create_directories(target_.parent_path(), ec);
    fs::rename(staging_, target_);
    committed_ = true;
}

} // namespace atlas
