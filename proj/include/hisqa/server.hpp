#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hisqa/config.hpp"
#include "hisqa/jsonl.hpp"

namespace httplib {
class Server;
}

namespace hisqa {

// HTTP backend of the annotation UI.
//
// Data directory layout:
//   scenes/*.json    scene files
//   motions/*.json   motion files
//   qa.jsonl         authored QA records (append-only)
//   ui/              static bundle served at /
class AnnotationServer {
public:
    AnnotationServer(std::filesystem::path data_dir, EngineConfig config);
    ~AnnotationServer();
    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    // Binds without serving; false when the port is unavailable. Port 0 picks a free port.
    bool bind(const std::string& host, int port);
    int port() const { return port_; }
    // Blocks until stop() is called. stop() may come first, from any thread; serve() then returns at once.
    void serve();
    void stop();

private:
    struct Cached;
    void register_routes();
    std::shared_ptr<const Cached> annotations_for(const std::string& scene_id, const std::string& motion_id);

    std::filesystem::path data_dir_;
    EngineConfig config_;
    std::string hash_;
    std::map<std::string, std::filesystem::path> scene_files_;
    std::map<std::string, std::filesystem::path> motion_files_;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<JsonlStore> qa_store_;
    std::mutex qa_mutex_;
    std::size_t qa_count_ = 0;
    std::mutex cache_mutex_;
    std::map<std::pair<std::string, std::string>, std::shared_ptr<const Cached>> cache_;
    int port_ = 0;
    std::atomic<bool> serving_{false};
    std::atomic<bool> stop_requested_{false};
};

}  // namespace hisqa
