#include "hisqa/jsonl.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hisqa/error.hpp"

namespace hisqa {

namespace {

class FileLock {
public:
    FileLock(int fd, int op) : fd_(fd) {
        while (::flock(fd_, op) != 0) {
            if (errno != EINTR) throw Error(ErrorCode::Io, std::string("flock failed: ") + std::strerror(errno));
        }
    }
    ~FileLock() { ::flock(fd_, LOCK_UN); }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_;
};

std::vector<nlohmann::json> parse_lines(std::istream& in, const std::string& where) {
    std::vector<nlohmann::json> records;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, "malformed JSONL record at line " + std::to_string(number) + ": " + e.what(),
                        where);
        }
    }
    return records;
}

}  // namespace

JsonlStore::JsonlStore(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, std::string("cannot open store: ") + std::strerror(errno), path_.string());
}

JsonlStore::~JsonlStore() {
    if (fd_ >= 0) ::close(fd_);
}

void JsonlStore::append(const nlohmann::json& record) {
    const std::string line = record.dump() + '\n';
    std::lock_guard guard(mutex_);
    FileLock lock(fd_, LOCK_EX);
    const ssize_t written = ::write(fd_, line.data(), line.size());
    if (written != static_cast<ssize_t>(line.size())) {
        throw Error(ErrorCode::Io, "short write to JSONL store", path_.string());
    }
    ::fsync(fd_);
}

std::vector<nlohmann::json> JsonlStore::read_all() const {
    std::lock_guard guard(mutex_);
    const int rfd = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
    if (rfd < 0) throw Error(ErrorCode::Io, "cannot read store", path_.string());
    std::string content;
    {
        FileLock lock(rfd, LOCK_SH);
        char buf[1 << 16];
        ssize_t n;
        while ((n = ::read(rfd, buf, sizeof buf)) > 0) content.append(buf, static_cast<std::size_t>(n));
    }
    ::close(rfd);
    std::istringstream in(content);
    return parse_lines(in, path_.string());
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open JSONL file", path.string());
    return parse_lines(in, path.string());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::string text;
    for (const auto& r : records) text += r.dump() + '\n';
    write_text(path, text);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write file", path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed", path.string());
}

}  // namespace hisqa
