#include <doctest.h>

#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "hisqa/config.hpp"
#include "hisqa/error.hpp"
#include "hisqa/jsonl.hpp"

using namespace hisqa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hisqa_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path p = dir / name;
    fs::remove(p);
    return p;
}

}  // namespace

TEST_CASE("default config carries the documented constants") {
    const EngineConfig c;
    CHECK(c.interaction.contact_epsilon == 0.1);
    CHECK(c.loss.activity == 0.5);
    CHECK(c.loss.spatial == 0.5);
    CHECK(c.loss.contact == 0.1);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config JSON round trip, unknown keys and validation") {
    EngineConfig c;
    c.stride = 7;
    c.seed = 99;
    c.llm.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    const EngineConfig back = config_from_json(config_to_json(c));
    CHECK(back.stride == 7);
    CHECK(back.seed == 99);
    CHECK(back.llm.endpoint == c.llm.endpoint);
    CHECK(config_hash(back) == config_hash(c));

    CHECK_THROWS_AS(config_from_json({{"epsilon", 0.1}}), Error);
    CHECK_THROWS_AS(config_from_json({{"llm", {{"url", "x"}}}}), Error);
    try {
        config_from_json({{"epsilon_m", -1.0}});
        FAIL("expected Precondition");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Precondition);
        CHECK(std::string(e.what()).find("epsilon_m") != std::string::npos);
    }
    CHECK_THROWS_AS(config_from_json({{"embed_dim", 63}}), Error);
}

TEST_CASE("config hash tracks every field") {
    const EngineConfig a;
    EngineConfig b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 64);
    b.interaction.contact_epsilon = 0.1000001;
    CHECK(config_hash(a) != config_hash(b));
    EngineConfig c;
    c.llm.temperature = 0.5;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("JSONL write/read and line-numbered errors") {
    const fs::path p = scratch("rw.jsonl");
    write_jsonl(p, {{{"a", 1}}, {{"b", 2}}});
    const auto back = read_jsonl(p);
    REQUIRE(back.size() == 2);
    CHECK(back[1].at("b") == 2);

    write_text(p, "{\"a\":1}\n\n{broken\n");
    try {
        read_jsonl(p);
        FAIL("expected Parse");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(read_text(scratch("missing.txt")), Error);
}

TEST_CASE("concurrent appends never interleave") {
    const fs::path p = scratch("concurrent.jsonl");
    {
        JsonlStore store(p);
        const std::string payload(5000, 'x');
        std::vector<std::jthread> writers;
        for (int w = 0; w < 4; ++w) {
            writers.emplace_back([&, w] {
                for (int i = 0; i < 50; ++i) store.append({{"writer", w}, {"i", i}, {"payload", payload}});
            });
        }
    }
    JsonlStore reopened(p);
    const auto all = reopened.read_all();
    CHECK(all.size() == 200);
    std::map<int, int> per_writer;
    for (const auto& r : all) {
        CHECK(r.at("payload").get<std::string>().size() == 5000);
        ++per_writer[r.at("writer").get<int>()];
    }
    for (int w = 0; w < 4; ++w) CHECK(per_writer[w] == 50);
}
