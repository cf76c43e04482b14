#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace atlas {

// Shortest exact decimal at 17 significant digits.
std::string g17(double v);

// CSV, comma separated, '.' decimal, header row, LF line endings.
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& content);

// FNV-1a content digest of a file, as 16 hex characters.
std::string file_digest(const std::filesystem::path& path);

// Collects files in a temporary sibling directory and renames it onto the
// target only on commit, so failed runs leave no partial outputs behind.
class StagedOutput {
public:
    explicit StagedOutput(std::filesystem::path target);
    ~StagedOutput();

    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    std::filesystem::path path(const std::string& name) const;
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool committed_ = false;
};

} // namespace atlas
