#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hisqa/aux_labels.hpp"
#include "hisqa/error.hpp"
#include "hisqa/eval.hpp"
#include "hisqa/jsonl.hpp"
#include "hisqa/pipeline.hpp"
#include "hisqa/server.hpp"

namespace hisqa {

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::size_t> stride;
    std::optional<double> epsilon;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    bool offline = false;
};

EngineConfig resolve_config(const GlobalOptions& g) {
    EngineConfig config = g.config_path.empty() ? EngineConfig{} : load_config(g.config_path);
    if (g.stride) config.stride = *g.stride;
    if (g.epsilon) config.interaction.contact_epsilon = *g.epsilon;
    if (g.k) config.k = *g.k;
    if (g.seed) config.seed = *g.seed;
    config.validate();
    return config;
}

bool online(const GlobalOptions& g, const EngineConfig& config) { return !g.offline && !config.llm.endpoint.empty(); }

std::vector<std::string> split_vocab(const std::string& list) {
    std::vector<std::string> names;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    return names;
}

std::vector<std::string> read_vocab_file(const std::string& path) {
    std::vector<std::string> names;
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    return names;
}

nlohmann::json embedding_json(const Embedding& e) { return std::vector<double>(e.data(), e.data() + e.size()); }

// ---- subcommands ----

struct AnnotateArgs {
    std::string scene, motion, out;
};

int cmd_annotate(const GlobalOptions& g, const AnnotateArgs& a, std::ostream& out) {
    const EngineConfig config = resolve_config(g);
    const Scene scene = load_scene(a.scene);
    const MotionSequence motion = load_motion(a.motion);
    const AnnotationRun run = annotate_sequence(scene, motion, config);
    const std::string hash = config_hash(config);
    std::vector<nlohmann::json> records;
    for (const auto& f : run.frames) records.push_back(annotation_record(scene, motion, f, hash));
    write_jsonl(a.out, records);
    write_text(a.out + ".meta.json", annotation_metadata(scene, motion, config, run).dump() + "\n");
    out << "annotated " << run.frames.size() << " key frames -> " << a.out << "\n";
    return 0;
}

struct LabelsArgs {
    std::string scene, motion, activity, vocab, vocab_file, annotations, out;
};

int cmd_labels(const GlobalOptions& g, const LabelsArgs& a, std::ostream& out) {
    const EngineConfig config = resolve_config(g);
    const Scene scene = load_scene(a.scene);
    const MotionSequence motion = load_motion(a.motion);
    if (a.vocab.empty() == a.vocab_file.empty()) {
        throw Error(ErrorCode::Precondition, "pass exactly one of --vocab or --vocab-file");
    }
    const ActivityVocab vocab(a.vocab.empty() ? read_vocab_file(a.vocab_file) : split_vocab(a.vocab));
    const std::size_t activity = activity_label(a.activity, vocab);

    std::vector<FrameAnnotation> annotations;
    if (!a.annotations.empty()) {
        for (const auto& r : read_jsonl(a.annotations)) {
            if (r.value("scene", "") != scene.id() || r.value("motion", "") != motion.id()) {
                throw Error(ErrorCode::ShapeMismatch, "annotation record belongs to another scene or motion", r.dump());
            }
            annotations.push_back(frame_annotation_from_json(r));
        }
    }
    const AuxLabels labels = build_aux_labels(scene, motion, activity, annotations, config.aux());
    nlohmann::json doc = aux_labels_to_json(labels);
    doc["scene"] = scene.id();
    doc["motion"] = motion.id();
    doc["activity_vocab"] = vocab.names();
    doc["config_hash"] = config_hash(config);
    write_text(a.out, doc.dump() + "\n");
    out << "wrote labels for " << scene.size() << " objects x " << motion.size() << " frames -> " << a.out << "\n";
    return 0;
}

struct EncodeArgs {
    std::string scene, motion, out, weights_dir;
};

int cmd_encode(const GlobalOptions& g, const EncodeArgs& a, std::ostream& out) {
    const EngineConfig config = resolve_config(g);
    const Scene scene = load_scene(a.scene);
    const MotionSequence motion = load_motion(a.motion);
    const PositionEncodings enc = encode_positions(scene, motion, config);

    nlohmann::json objects = nlohmann::json::array();
    for (std::size_t i = 0; i < scene.size(); ++i) {
        objects.push_back({{"id", scene[i].id}, {"encoding", embedding_json(enc.objects[i])}});
    }
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& e : enc.frames) frames.push_back(embedding_json(e));
    const nlohmann::json doc = {
        {"semantics_version", kKernelSemantics},
        {"scene", scene.id()},
        {"motion", motion.id()},
        {"dim", config.embed_dim},
        {"seed", config.seed},
        {"objects", objects},
        {"frames", frames},
        {"config_hash", config_hash(config)},
    };
    write_text(a.out, doc.dump() + "\n");
    if (!a.weights_dir.empty()) {
        std::filesystem::create_directories(a.weights_dir);
        for (const auto& [name, w] : {std::pair{"phi_sf.bin", &enc.spatial}, std::pair{"phi_tf.bin", &enc.temporal}}) {
            std::ofstream f(std::filesystem::path(a.weights_dir) / name, std::ios::binary);
            write_weights(f, *w);
        }
    }
    out << "wrote " << enc.objects.size() << " object and " << enc.frames.size() << " frame encodings -> " << a.out
        << "\n";
    return 0;
}

struct GenqaArgs {
    std::string scene, motion, activity, out, responses, transcripts;
    std::vector<std::string> subtasks;
};

int cmd_genqa(const GlobalOptions& g, const GenqaArgs& a, std::ostream& out) {
    const EngineConfig config = resolve_config(g);
    std::vector<std::string> tags = a.subtasks;
    if (tags.empty()) {
        for (auto t : generatable_subtasks()) tags.emplace_back(t);
    }
    for (const auto& t : tags) {
        const SubtaskInfo* info = find_subtask(t);
        if (!info) throw Error(ErrorCode::UnknownSubtask, "unknown sub-task", t);
        if (!info->generatable) {
            throw Error(ErrorCode::NotGeneratable,
                        "sub-task '" + t + "' is human-annotated; author it in the annotation UI (hisqa serve)", t);
        }
    }

    const Scene scene = load_scene(a.scene);
    const MotionSequence motion = load_motion(a.motion);
    const AnnotationRun run = annotate_sequence(scene, motion, config);
    const AnnotationBundle bundle = make_bundle(scene, motion, a.activity, run.frames);
    const std::string hash = config_hash(config);

    std::vector<std::string> prompts;
    for (const auto& t : tags) prompts.push_back(build_qa_prompt(bundle, t));

    std::vector<LlmOutcome> outcomes(tags.size());
    if (!a.responses.empty()) {
        std::map<std::string, std::string> recorded;
        for (const auto& r : read_jsonl(a.responses)) {
            recorded[r.at("subtask").get<std::string>()] = r.at("response").get<std::string>();
        }
        for (std::size_t i = 0; i < tags.size(); ++i) {
            if (auto it = recorded.find(tags[i]); it != recorded.end()) {
                outcomes[i].response = it->second;
            } else {
                outcomes[i].error = "no recorded response";
            }
        }
    } else if (online(g, config)) {
        auto client = make_llm_client(config.llm);
        outcomes = send_all(*client, prompts, config.llm.max_in_flight);
    } else {
        std::vector<nlohmann::json> records;
        for (std::size_t i = 0; i < tags.size(); ++i) {
            records.push_back({{"subtask", tags[i]},
                               {"scene", scene.id()},
                               {"motion", motion.id()},
                               {"prompt", prompts[i]},
                               {"config_hash", hash}});
        }
        write_jsonl(a.out, records);
        out << "offline: wrote " << records.size() << " prompts -> " << a.out << "\n";
        return 0;
    }

    if (!a.transcripts.empty()) {
        JsonlStore transcripts(a.transcripts);
        for (std::size_t i = 0; i < tags.size(); ++i) {
            auto record = transcript_record("genqa", prompts[i], outcomes[i]);
            record["subtask"] = tags[i];
            record["llm"] = {{"model", config.llm.model}, {"temperature", config.llm.temperature}};
            transcripts.append(record);
        }
    }

    const QAContext base{"", scene.id(), motion.id(), 0, motion.size() - 1, motion.size()};
    std::vector<nlohmann::json> records;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (!outcomes[i].response) {
            ++failures;
            continue;
        }
        QAContext ctx = base;
        ctx.subtask = tags[i];
        try {
            for (const auto& r : parse_llm_qa(*outcomes[i].response, ctx)) {
                auto j = qa_record_to_json(r);
                j["config_hash"] = hash;
                records.push_back(std::move(j));
            }
        } catch (const Error&) {
            ++failures;
        }
    }
    write_jsonl(a.out, records);
    out << "wrote " << records.size() << " QA records -> " << a.out << " (" << failures << " failed sub-tasks)\n";
    return failures == 0 ? 0 : 2;
}

struct EvalArgs {
    std::string scores, out, transcripts;
};

int cmd_eval(const GlobalOptions& g, const EvalArgs& a, std::ostream& out) {
    const EngineConfig config = resolve_config(g);
    const auto entries = read_jsonl(a.scores);

    std::vector<ScoreRecord> records;
    std::vector<std::string> failed;
    std::vector<std::size_t> pending;  // entries needing a live judge call
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.contains("score")) {
            records.push_back(score_record_from_json(e));
        } else if (e.contains("judge_output")) {
            try {
                records.push_back({e.at("question_id").get<std::string>(),
                                   parse_judge_score(e.at("judge_output").get<std::string>()),
                                   e.at("subtask").get<std::string>()});
            } catch (const Error& err) {
                if (err.code() != ErrorCode::JudgeFormat) throw;
                failed.push_back(e.value("question_id", ""));
            }
        } else if (e.contains("answer") && e.contains("ground_truth") && e.contains("question")) {
            pending.push_back(i);
        } else {
            throw Error(ErrorCode::Schema, "score entry needs 'score', 'judge_output' or question/ground_truth/answer",
                        e.dump());
        }
    }

    if (!pending.empty()) {
        if (!online(g, config)) {
            throw Error(ErrorCode::Precondition,
                        "entries without recorded judge outputs need an LLM endpoint (offline mode is active)");
        }
        std::vector<std::string> prompts;
        for (std::size_t i : pending) {
            const auto& e = entries[i];
            prompts.push_back(build_judge_prompt(e.at("question").get<std::string>(),
                                                 e.at("ground_truth").get<std::string>(),
                                                 e.at("answer").get<std::string>()));
        }
        auto client = make_llm_client(config.llm);
        const auto outcomes = send_all(*client, prompts, config.llm.max_in_flight);
        std::optional<JsonlStore> transcripts;
        if (!a.transcripts.empty()) transcripts.emplace(a.transcripts);
        for (std::size_t n = 0; n < pending.size(); ++n) {
            const auto& e = entries[pending[n]];
            if (transcripts) {
                auto rec = transcript_record("judge", prompts[n], outcomes[n]);
                rec["question_id"] = e.value("question_id", "");
                transcripts->append(rec);
            }
            try {
                if (!outcomes[n].response) throw Error(ErrorCode::JudgeFormat, outcomes[n].error);
                records.push_back({e.at("question_id").get<std::string>(), parse_judge_score(*outcomes[n].response),
                                   e.at("subtask").get<std::string>()});
            } catch (const Error&) {
                failed.push_back(e.value("question_id", ""));
            }
        }
    }

    const std::size_t failures = failed.size();
    const EvalReport report = build_report(records, failures, std::move(failed));
    nlohmann::json doc = report_to_json(report);
    doc["config_hash"] = config_hash(config);
    write_text(a.out, doc.dump(2) + "\n");
    out << "scored " << records.size() << " answers over " << report.per_task.size() << " sub-tasks, "
        << report.parse_failures << " parse failures -> " << a.out << "\n";
    return 0;
}

struct ServeArgs {
    std::string data_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
};

int cmd_serve(const GlobalOptions& g, const ServeArgs& a, std::ostream& out, std::ostream& err) {
    const EngineConfig config = resolve_config(g);
    AnnotationServer server(a.data_dir, config);
    if (!server.bind(a.host, a.port)) {
        err << "error: cannot bind " << a.host << ":" << a.port << "\n";
        return 2;
    }

    // Route SIGINT/SIGTERM to a watcher thread; the server threads inherit the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::jthread watcher([&](std::stop_token) {
        int received = 0;
        sigwait(&signals, &received);
        server.stop();
    });

    out << "serving " << a.data_dir << " on http://" << a.host << ":" << server.port() << "\n" << std::flush;
    server.serve();
    if (watcher.joinable()) {
        // serve() can only return after stop(), which the watcher issues
        watcher.join();
    }
    out << "server stopped\n";
    return 0;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Human-in-scene annotation, supervision and evaluation engine", "hisqa"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Engine configuration JSON")->check(CLI::ExistingFile);
    app.add_option("--stride", g.stride, "Key frame stride");
    app.add_option("--epsilon", g.epsilon, "Contact threshold in meters");
    app.add_option("--k", g.k, "Nearest objects per frame");
    app.add_option("--seed", g.seed, "Projection weight seed");
    app.add_flag("--offline", g.offline, "Never contact the LLM endpoint");

    AnnotateArgs annotate;
    auto* annotate_cmd = app.add_subcommand("annotate", "Frame-level contact/position annotations as JSONL");
    annotate_cmd->add_option("--scene", annotate.scene)->required();
    annotate_cmd->add_option("--motion", annotate.motion)->required();
    annotate_cmd->add_option("--out", annotate.out)->required();

    LabelsArgs labels;
    auto* labels_cmd = app.add_subcommand("labels", "Auxiliary supervision labels");
    labels_cmd->add_option("--scene", labels.scene)->required();
    labels_cmd->add_option("--motion", labels.motion)->required();
    labels_cmd->add_option("--activity", labels.activity)->required();
    labels_cmd->add_option("--vocab", labels.vocab, "Comma-separated activity names");
    labels_cmd->add_option("--vocab-file", labels.vocab_file, "One activity name per line");
    labels_cmd->add_option("--annotations", labels.annotations, "JSONL from `annotate` to reuse");
    labels_cmd->add_option("--out", labels.out)->required();

    EncodeArgs encode;
    auto* encode_cmd = app.add_subcommand("encode", "Layout/trajectory position encodings");
    encode_cmd->add_option("--scene", encode.scene)->required();
    encode_cmd->add_option("--motion", encode.motion)->required();
    encode_cmd->add_option("--out", encode.out)->required();
    encode_cmd->add_option("--weights-dir", encode.weights_dir, "Also write the projection weights here");

    GenqaArgs genqa;
    auto* genqa_cmd = app.add_subcommand("genqa", "Build QA-generation prompts and parse responses");
    genqa_cmd->add_option("--scene", genqa.scene)->required();
    genqa_cmd->add_option("--motion", genqa.motion)->required();
    genqa_cmd->add_option("--activity", genqa.activity)->required();
    genqa_cmd->add_option("--subtask", genqa.subtasks, "Sub-task tag (repeatable; default: all generatable)");
    genqa_cmd->add_option("--responses", genqa.responses, "Recorded responses JSONL {subtask, response}");
    genqa_cmd->add_option("--transcripts", genqa.transcripts, "Append prompt/response transcripts here");
    genqa_cmd->add_option("--out", genqa.out)->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score judged answers per sub-task");
    eval_cmd->add_option("--scores", eval.scores, "JSONL of scores, judge outputs, or answers to judge")->required();
    eval_cmd->add_option("--transcripts", eval.transcripts);
    eval_cmd->add_option("--out", eval.out)->required();

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP API and static UI for human annotation");
    serve_cmd->add_option("--data-dir", serve.data_dir)->required();
    serve_cmd->add_option("--port", serve.port);
    serve_cmd->add_option("--host", serve.host);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*annotate_cmd) return cmd_annotate(g, annotate, out);
        if (*labels_cmd) return cmd_labels(g, labels, out);
        if (*encode_cmd) return cmd_encode(g, encode, out);
        if (*genqa_cmd) return cmd_genqa(g, genqa, out);
        if (*eval_cmd) return cmd_eval(g, eval, out);
        if (*serve_cmd) return cmd_serve(g, serve, out, err);
    } catch (const Error& e) {
        err << "error[" << to_string(e.code()) << "]: " << e.what();
        if (!e.detail().empty()) err << " (" << e.detail() << ")";
        err << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace hisqa
