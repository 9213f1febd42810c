#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hisqa/config.hpp"

namespace hisqa {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct AnnotationRun {
    std::vector<std::size_t> key_frames;
    std::vector<FrameAnnotation> frames;  // one per key frame, same order
};

AnnotationRun annotate_sequence(const Scene& scene, const MotionSequence& motion, const EngineConfig& config);

// One JSONL line of `hisqa annotate`.
nlohmann::json annotation_record(const Scene& scene, const MotionSequence& motion, const FrameAnnotation& frame,
                                 const std::string& hash);
nlohmann::json annotation_metadata(const Scene& scene, const MotionSequence& motion, const EngineConfig& config,
                                   const AnnotationRun& run);

struct PositionEncodings {
    ProjectionWeights spatial;   // 3 x d/2
    ProjectionWeights temporal;  // 1 x d/2
    std::vector<Embedding> objects;
    std::vector<Embedding> frames;
};

// Object and per-frame encodings with seeded projections; locations are
// normalized by the scene bounds.
PositionEncodings encode_positions(const Scene& scene, const MotionSequence& motion, const EngineConfig& config);

// Entry point of the `hisqa` tool. Returns the process exit status: 0 on
// success, 2 on any usage, input or runtime error.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hisqa
