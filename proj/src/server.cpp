#include "hisqa/server.hpp"

#include <cstdio>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "hisqa/pipeline.hpp"

namespace hisqa {

struct AnnotationServer::Cached {
    nlohmann::json body;
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message,
                std::string_view detail = {}) {
    send_json(res, status, {{"code", code}, {"message", message}, {"detail", detail}});
}

std::map<std::string, std::filesystem::path> index_dir(const std::filesystem::path& dir, bool scenes) {
    std::map<std::string, std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) return files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        const std::string id = scenes ? load_scene(entry.path()).id() : load_motion(entry.path()).id();
        if (!files.emplace(id, entry.path()).second) {
            throw Error(ErrorCode::Schema, "duplicate id in data directory", id);
        }
    }
    return files;
}

nlohmann::json id_list(const std::map<std::string, std::filesystem::path>& files) {
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& [id, path] : files) ids.push_back(id);
    return ids;
}

}  // namespace

AnnotationServer::AnnotationServer(std::filesystem::path data_dir, EngineConfig config)
    : data_dir_(std::move(data_dir)), config_(std::move(config)), hash_(config_hash(config_)) {
    if (!std::filesystem::is_directory(data_dir_)) {
        throw Error(ErrorCode::Io, "data directory does not exist", data_dir_.string());
    }
    scene_files_ = index_dir(data_dir_ / "scenes", true);
    motion_files_ = index_dir(data_dir_ / "motions", false);
    qa_store_ = std::make_unique<JsonlStore>(data_dir_ / "qa.jsonl");
    qa_count_ = qa_store_->read_all().size();
    http_ = std::make_unique<httplib::Server>();
    // httplib's default also sets SO_REUSEPORT, which lets a second server share the port
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    register_routes();
}

AnnotationServer::~AnnotationServer() = default;

bool AnnotationServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = http_->bind_to_any_port(host);
        return port_ > 0;
    }
    if (!http_->bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void AnnotationServer::serve() {
    serving_ = true;
    if (stop_requested_) return;
    http_->listen_after_bind();
}

// httplib drops a stop() that lands before its accept loop is running
void AnnotationServer::stop() {
    stop_requested_ = true;
    if (serving_) http_->wait_until_ready();
    http_->stop();
}

std::shared_ptr<const AnnotationServer::Cached> AnnotationServer::annotations_for(const std::string& scene_id,
                                                                                 const std::string& motion_id) {
    const auto key = std::make_pair(scene_id, motion_id);
    {
        std::lock_guard guard(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const Scene scene = load_scene(scene_files_.at(scene_id));
    const MotionSequence motion = load_motion(motion_files_.at(motion_id));
    const AnnotationRun run = annotate_sequence(scene, motion, config_);
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : run.frames) frames.push_back(annotation_record(scene, motion, f, hash_));
    auto cached = std::make_shared<Cached>(Cached{{
        {"scene", scene_id},
        {"motion", motion_id},
        {"config_hash", hash_},
        {"frame_count", motion.size()},
        {"key_frames", run.key_frames},
        {"frames", std::move(frames)},
    }});
    std::lock_guard guard(cache_mutex_);
    return cache_.emplace(key, std::move(cached)).first->second;
}

void AnnotationServer::register_routes() {
    auto& s = *http_;

    s.Get("/api/scenes", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"scenes", id_list(scene_files_)}, {"motions", id_list(motion_files_)}});
    });

    s.Get(R"(/api/scene/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto it = scene_files_.find(id);
        if (it == scene_files_.end()) return send_error(res, 404, "not_found", "unknown scene", id);
        const Scene scene = load_scene(it->second);
        nlohmann::json body = scene_to_json(scene);
        nlohmann::json relations = nlohmann::json::array();
        for (const auto& t : build_scene_graph(scene, config_.graph)) {
            relations.push_back({{"subject", t.subject_id},
                                 {"predicate", to_string(t.predicate)},
                                 {"object", t.object_id},
                                 {"text", refer_expression(t, scene)}});
        }
        body["relations"] = std::move(relations);
        send_json(res, 200, body);
    });

    s.Get(R"(/api/motion/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto it = motion_files_.find(id);
        if (it == motion_files_.end()) return send_error(res, 404, "not_found", "unknown motion", id);
        send_json(res, 200, motion_to_json(load_motion(it->second)));
    });

    s.Get(R"(/api/annotations/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string scene_id = req.matches[1];
        const std::string motion_id = req.matches[2];
        if (!scene_files_.contains(scene_id)) return send_error(res, 404, "not_found", "unknown scene", scene_id);
        if (!motion_files_.contains(motion_id)) return send_error(res, 404, "not_found", "unknown motion", motion_id);
        send_json(res, 200, annotations_for(scene_id, motion_id)->body);
    });

    s.Get("/api/qa", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string scene = req.get_param_value("scene");
        const std::string motion = req.get_param_value("motion");
        nlohmann::json records = nlohmann::json::array();
        for (auto& r : qa_store_->read_all()) {
            if (!scene.empty() && r.value("scene", "") != scene) continue;
            if (!motion.empty() && r.value("motion", "") != motion) continue;
            records.push_back(std::move(r));
        }
        send_json(res, 200, {{"records", records}});
    });

    s.Post("/api/qa", [this](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            return send_error(res, 400, "bad_json", "request body is not valid JSON", e.what());
        }
        QARecord record;
        try {
            record = qa_record_from_json(body);
        } catch (const Error& e) {
            return send_error(res, 422, "invalid_record", e.what(), "");
        }
        if (!scene_files_.contains(record.scene_id)) {
            return send_error(res, 422, "invalid_record", "unknown scene", "scene");
        }
        const auto motion = motion_files_.find(record.motion_id);
        if (motion == motion_files_.end()) return send_error(res, 422, "invalid_record", "unknown motion", "motion");
        const std::size_t frame_count = load_motion(motion->second).size();
        if (auto bad = check_qa_record(record, frame_count)) {
            return send_error(res, 422, "invalid_record", bad->message, bad->field);
        }

        std::lock_guard guard(qa_mutex_);
        char id[32];
        std::snprintf(id, sizeof id, "qa-%06zu", qa_count_ + 1);
        record.id = id;
        const nlohmann::json stored = qa_record_to_json(record);
        qa_store_->append(stored);
        ++qa_count_;
        send_json(res, 201, stored);
    });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_error(res, 500, to_string(e.code()), e.what(), e.detail());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    });

    const auto ui_dir = data_dir_ / "ui";
    if (std::filesystem::is_directory(ui_dir)) s.set_mount_point("/", ui_dir.string());
}

}  // namespace hisqa
