#include "hisqa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"

namespace hisqa {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard guard(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

AnnotationRun annotate_sequence(const Scene& scene, const MotionSequence& motion, const EngineConfig& config) {
    AnnotationRun run;
    std::vector<std::size_t> extra;
    if (config.contact_change_key_frames) {
        extra = contact_change_frames(motion, scene, config.interaction.contact_epsilon);
    }
    run.key_frames = select_key_frames(motion, config.stride, extra);
    run.frames.resize(run.key_frames.size());
    parallel_for(run.key_frames.size(), [&](std::size_t i) {
        run.frames[i] = annotate_frame(motion[run.key_frames[i]], scene, config.interaction);
    });
    return run;
}

nlohmann::json annotation_record(const Scene& scene, const MotionSequence& motion, const FrameAnnotation& frame,
                                 const std::string& hash) {
    nlohmann::json record = frame_annotation_to_json(frame);
    record["scene"] = scene.id();
    record["motion"] = motion.id();
    record["config_hash"] = hash;
    return record;
}

nlohmann::json annotation_metadata(const Scene& scene, const MotionSequence& motion, const EngineConfig& config,
                                   const AnnotationRun& run) {
    std::size_t contacts = 0, positions = 0, betweens = 0;
    for (const auto& f : run.frames) {
        contacts += f.contacts.size();
        positions += f.positions.size();
        betweens += f.betweens.size();
    }
    return {
        {"kind", "annotate_metadata"},
        {"scene", scene.id()},
        {"motion", motion.id()},
        {"config_hash", config_hash(config)},
        {"config", config_to_json(config)},
        {"key_frames", run.key_frames},
        {"counts",
         {{"frames", run.frames.size()}, {"contacts", contacts}, {"positions", positions}, {"betweens", betweens}}},
    };
}

PositionEncodings encode_positions(const Scene& scene, const MotionSequence& motion, const EngineConfig& config) {
    config.validate();
    const std::size_t half = config.embed_dim / 2;
    PositionEncodings enc{
        ProjectionWeights::gaussian(3, half, config.seed),
        ProjectionWeights::gaussian(1, half, config.seed + 1),
        {},
        {},
    };
    const auto [lower, upper] = scene.bounds();
    for (const SceneObject& o : scene.objects()) {
        enc.objects.push_back(
            object_pos_encoding(normalize_location(o.box.center, lower, upper), motion.size(), enc.spatial, enc.temporal));
    }
    for (std::size_t t = 0; t < motion.size(); ++t) {
        const Vec3 location = normalize_location(frame_location(motion[t]), lower, upper);
        enc.frames.push_back(motion_pos_encoding(t + 1, motion.size(), location, enc.spatial, enc.temporal));
    }
    return enc;
}

}  // namespace hisqa
