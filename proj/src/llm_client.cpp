#include <atomic>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hisqa/error.hpp"
#include "hisqa/textgen.hpp"

namespace hisqa {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, pattern)) {
        throw Error(ErrorCode::Llm, "LLM endpoint must be an http(s) URL", url);
    }
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

HttpLlmClient::HttpLlmClient(LlmSettings settings) : settings_(std::move(settings)) {
    split_endpoint(settings_.endpoint);
}

std::string HttpLlmClient::send(const std::string& prompt) {
    const Endpoint ep = split_endpoint(settings_.endpoint);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(settings_.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!settings_.token_env.empty()) {
        if (const char* token = std::getenv(settings_.token_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }
    const nlohmann::json body = {
        {"model", settings_.model},
        {"temperature", settings_.temperature},
        {"messages", {{{"role", "user"}, {"content", prompt}}}},
    };
    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::Llm, "LLM request failed: " + httplib::to_string(res.error()), settings_.endpoint);
    }
    if (res->status != 200) {
        throw Error(ErrorCode::Llm, "LLM endpoint returned HTTP " + std::to_string(res->status), res->body);
    }
    try {
        const auto doc = nlohmann::json::parse(res->body);
        std::string text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (text.empty()) throw Error(ErrorCode::Llm, "LLM returned an empty message", res->body);
        return text;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Llm, std::string("unexpected LLM response shape: ") + e.what(), res->body);
    }
}

RetryingClient::RetryingClient(std::shared_ptr<LlmClient> inner, int retries, double backoff_s, Sleeper sleeper)
    : inner_(std::move(inner)), retries_(std::max(0, retries)), backoff_s_(backoff_s), sleeper_(std::move(sleeper)) {
    if (!sleeper_) sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
}

std::string RetryingClient::send(const std::string& prompt) {
    double delay = backoff_s_;
    for (int attempt = 0;; ++attempt) {
        try {
            return inner_->send(prompt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Llm || attempt >= retries_) throw;
        }
        sleeper_(std::chrono::duration<double>(delay));
        delay *= 2.0;
    }
}

std::string ReplayClient::send(const std::string& prompt) {
    const auto it = responses_.find(prompt);
    if (it == responses_.end()) throw Error(ErrorCode::Llm, "no recorded response for prompt", prompt.substr(0, 200));
    if (it->second.empty()) throw Error(ErrorCode::Llm, "recorded response is empty");
    return it->second;
}

std::unique_ptr<LlmClient> make_llm_client(const LlmSettings& settings) {
    if (settings.endpoint.empty()) return nullptr;
    auto http = std::make_shared<HttpLlmClient>(settings);
    return std::make_unique<RetryingClient>(std::move(http), settings.retries, settings.backoff_s);
}

std::vector<LlmOutcome> send_all(LlmClient& client, std::span<const std::string> prompts, std::size_t max_in_flight) {
    std::vector<LlmOutcome> outcomes(prompts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
            try {
                outcomes[i].response = client.send(prompts[i]);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(1, max_in_flight), prompts.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return outcomes;
}

nlohmann::json transcript_record(std::string_view kind, std::string_view prompt, const LlmOutcome& outcome) {
    nlohmann::json j = {{"kind", kind}, {"prompt", prompt}};
    j["response"] = outcome.response ? nlohmann::json(*outcome.response) : nlohmann::json(nullptr);
    if (!outcome.error.empty()) j["error"] = outcome.error;
    return j;
}

}  // namespace hisqa
