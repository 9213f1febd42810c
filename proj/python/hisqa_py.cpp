#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "hisqa/aux_labels.hpp"
#include "hisqa/config.hpp"
#include "hisqa/error.hpp"
#include "hisqa/eval.hpp"
#include "hisqa/interaction.hpp"
#include "hisqa/kernels.hpp"
#include "hisqa/pipeline.hpp"
#include "hisqa/textgen.hpp"

namespace py = pybind11;
using namespace hisqa;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PoseFrame frame_from_array(const RowMatrix& joints) {
    if (joints.rows() != static_cast<Eigen::Index>(kJointCount) || joints.cols() != 3) {
        throw Error(ErrorCode::ShapeMismatch, "pose must be a 22 x 3 array");
    }
    PoseFrame f;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        f.joints[j] = {joints(r, 0), joints(r, 1), joints(r, 2)};
    }
    return f;
}

Vec3 vec3(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

std::vector<Embedding> rows(const RowMatrix& m) {
    std::vector<Embedding> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
    return out;
}

RowMatrix stack(const std::vector<Eigen::VectorXd>& vs) {
    RowMatrix m(static_cast<Eigen::Index>(vs.size()), vs.empty() ? 0 : vs.front().size());
    for (std::size_t i = 0; i < vs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
    return m;
}

ProjectionWeights weights(const Eigen::MatrixXd& m) { return ProjectionWeights{m, 0}; }

EngineConfig config_from(const std::string& text) {
    return text.empty() ? EngineConfig{} : config_from_json(nlohmann::json::parse(text));
}

py::dict pair_loss_dict(const PairLoss& l) {
    py::dict d;
    d["loss"] = l.loss;
    d["d_scene"] = stack(l.d_scene);
    d["d_motion"] = stack(l.d_motion);
    d["d_scene_proj"] = l.d_scene_proj;
    d["d_motion_proj"] = l.d_motion_proj;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hisqa, m) {
    m.doc() = "Native core of the hisqa annotation engine";

    static py::exception<Error> error(m, "HisqaError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            exc.attr("detail") = e.detail();
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.attr("JOINT_NAMES") = [] {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < kJointCount; ++j) names.emplace_back(joint_name(joint_at(j)));
        return names;
    }();

    // geometry and poses
    m.def("facing_direction", [](const RowMatrix& joints) {
        const Vec2 d = facing_direction(frame_from_array(joints));
        return std::pair{d.x, d.y};
    });
    m.def("signed_heading_angle", [](std::pair<double, double> facing, std::pair<double, double> target) {
        return signed_heading_angle({facing.first, facing.second}, {target.first, target.second});
    });
    m.def("nearest_distance", [](const Eigen::Vector3d& p, const RowMatrix& points) {
        std::vector<Vec3> pts;
        for (Eigen::Index i = 0; i < points.rows(); ++i) pts.push_back({points(i, 0), points(i, 1), points(i, 2)});
        return nearest_distance(vec3(p), PointCloud(std::move(pts)));
    });

    // scenes are passed around as JSON text; the Python wrapper parses it
    m.def("scene_graph", [](const std::string& scene_path) {
        const Scene scene = load_scene(scene_path);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& t : build_scene_graph(scene)) {
            out.push_back({{"subject", t.subject_id}, {"predicate", to_string(t.predicate)}, {"object", t.object_id},
                           {"text", refer_expression(t, scene)}});
        }
        return out.dump();
    });
    m.def("annotate_frame", [](const std::string& scene_path, const RowMatrix& joints, const std::string& config) {
        return frame_annotation_to_json(annotate_frame(frame_from_array(joints), load_scene(scene_path),
                                                       config_from(config).interaction))
            .dump();
    }, py::arg("scene_path"), py::arg("joints"), py::arg("config") = "");
    m.def("annotate", [](const std::string& scene_path, const std::string& motion_path, const std::string& config) {
        const Scene scene = load_scene(scene_path);
        const MotionSequence motion = load_motion(motion_path);
        const EngineConfig cfg = config_from(config);
        const std::string hash = config_hash(cfg);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& f : annotate_sequence(scene, motion, cfg).frames) out.push_back(annotation_record(scene, motion, f, hash));
        return out.dump();
    }, py::arg("scene_path"), py::arg("motion_path"), py::arg("config") = "");
    m.def("aux_labels", [](const std::string& scene_path, const std::string& motion_path, std::size_t activity,
                           const std::string& config) {
        const EngineConfig cfg = config_from(config);
        return aux_labels_to_json(build_aux_labels(load_scene(scene_path), load_motion(motion_path), activity, {}, cfg.aux()))
            .dump();
    }, py::arg("scene_path"), py::arg("motion_path"), py::arg("activity"), py::arg("config") = "");
    m.def("config_hash", [](const std::string& config) { return config_hash(config_from(config)); },
          py::arg("config") = "");

    // kernels
    m.def("gaussian_weights", [](std::size_t in, std::size_t out, std::uint64_t seed) {
        return ProjectionWeights::gaussian(in, out, seed).matrix;
    });
    m.def("sf_encode", [](const Eigen::Vector3d& mu, const Eigen::MatrixXd& phi) { return sf_encode(vec3(mu), weights(phi)); });
    m.def("tf_encode", [](std::size_t t, std::size_t frames, const Eigen::MatrixXd& phi) {
        return tf_encode(t, frames, weights(phi));
    });
    m.def("object_pos_encoding", [](const Eigen::Vector3d& mu, std::size_t frames, const Eigen::MatrixXd& phi_sf,
                                    const Eigen::MatrixXd& phi_tf) {
        return object_pos_encoding(vec3(mu), frames, weights(phi_sf), weights(phi_tf));
    });
    m.def("spa_loss", [](const RowMatrix& scene, const RowMatrix& motion, const std::vector<int>& targets,
                         const Eigen::MatrixXd& ws, const Eigen::MatrixXd& wm) {
        std::vector<SpatialRelation8> t;
        for (int v : targets) {
            if (v < 0 || v >= static_cast<int>(kSpatialClasses)) throw Error(ErrorCode::OutOfRange, "spatial target out of range");
            t.push_back(static_cast<SpatialRelation8>(v));
        }
        return pair_loss_dict(spa_loss(rows(scene), rows(motion), t, weights(ws), weights(wm)));
    });
    m.def("cont_loss", [](const RowMatrix& scene, const RowMatrix& motion, const RowMatrix& targets,
                          const Eigen::MatrixXd& ws, const Eigen::MatrixXd& wm) {
        // targets: (N*T) x 22 of 0/1, row i*T + t
        const std::size_t n = static_cast<std::size_t>(scene.rows()), t = static_cast<std::size_t>(motion.rows());
        if (targets.rows() != static_cast<Eigen::Index>(n * t) || targets.cols() != static_cast<Eigen::Index>(kJointCount)) {
            throw Error(ErrorCode::ShapeMismatch, "contact targets must be (N*T) x 22");
        }
        ContactTensor c(n, t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s = 0; s < t; ++s)
                for (std::size_t l = 0; l < kJointCount; ++l)
                    c.set(i, s, l, targets(static_cast<Eigen::Index>(i * t + s), static_cast<Eigen::Index>(l)) != 0.0);
        return pair_loss_dict(cont_loss(rows(scene), rows(motion), c, weights(ws), weights(wm)));
    });
    m.def("act_loss", [](const RowMatrix& fused, std::size_t target, const Eigen::MatrixXd& hidden,
                         const Eigen::VectorXd& hidden_bias, const Eigen::MatrixXd& output, const Eigen::VectorXd& output_bias) {
        const ActivityHead head{weights(hidden), hidden_bias, weights(output), output_bias};
        const ActivityLoss l = act_loss(rows(fused), target, head);
        py::dict d;
        d["loss"] = l.loss;
        d["d_fused"] = stack(l.d_fused);
        d["d_hidden"] = l.d_hidden;
        d["d_hidden_bias"] = l.d_hidden_bias;
        d["d_output"] = l.d_output;
        d["d_output_bias"] = l.d_output_bias;
        return d;
    });

    // text and scoring
    m.def("subtasks", [] {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& s : subtasks()) out.emplace_back(std::string(s.tag), s.generatable);
        return out;
    });
    m.def("qa_prompt", [](const std::string& scene_path, const std::string& motion_path, const std::string& activity,
                          const std::string& subtask, const std::string& config) {
        const Scene scene = load_scene(scene_path);
        const MotionSequence motion = load_motion(motion_path);
        const AnnotationRun run = annotate_sequence(scene, motion, config_from(config));
        return build_qa_prompt(make_bundle(scene, motion, activity, run.frames), subtask);
    }, py::arg("scene_path"), py::arg("motion_path"), py::arg("activity"), py::arg("subtask"), py::arg("config") = "");
    m.def("judge_prompt", &build_judge_prompt);
    m.def("parse_judge_score", &parse_judge_score);
    m.def("task_score", [](const std::vector<int>& scores) {
        std::vector<ScoreRecord> records;
        for (int s : scores) records.push_back({"", s, "task"});
        return task_score(records);
    });
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "hisqa");
        std::ostringstream out, err;
        int status;
        {
            py::gil_scoped_release release;
            status = run_cli(args, out, err);
        }
        return py::make_tuple(status, out.str(), err.str());
    });
}
