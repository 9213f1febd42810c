#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hisqa {

// Append-only JSON Lines file. Each record is written with a single write(2)
// on an O_APPEND descriptor while holding an exclusive flock, so concurrent
// writers (threads or processes) never interleave partial records.
class JsonlStore {
public:
    explicit JsonlStore(std::filesystem::path path);
    JsonlStore(const JsonlStore&) = delete;
    JsonlStore& operator=(const JsonlStore&) = delete;
    ~JsonlStore();

    const std::filesystem::path& path() const { return path_; }
    void append(const nlohmann::json& record);
    std::vector<nlohmann::json> read_all() const;

private:
    std::filesystem::path path_;
    int fd_ = -1;
    mutable std::mutex mutex_;
};

// Whole-file helpers. read_jsonl skips blank lines and reports the line number
// of malformed records.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hisqa
