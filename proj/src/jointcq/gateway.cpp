#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "jointcq/gateway.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/util.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

namespace jointcq {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// httplib transport

namespace {

// Splits "https://host[:port]/some/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidArgumentError("url without scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

    HttpResponse post_json(const std::string& url, const std::string& body,
                           const std::vector<HttpHeader>& headers) override {
        auto [origin, path] = split_url(url);
        httplib::Client client(origin);
        client.set_connection_timeout(timeout_seconds_, 0);
        client.set_read_timeout(timeout_seconds_, 0);
        client.set_write_timeout(timeout_seconds_, 0);
        httplib::Headers hdrs;
        for (const auto& h : headers) hdrs.emplace(h.name, h.value);
        auto result = client.Post(path, hdrs, body, "application/json");
        if (!result) {
            throw TransportError("POST " + url + " failed: " + httplib::to_string(result.error()));
        }
        return HttpResponse{result->status, result->body};
    }

private:
    int timeout_seconds_;
};

// Runs one logical call with retries on transport errors.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) {
    int attempts = std::max(policy.attempts, 1);
    for (int attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const TransportError&) {
            if (attempt + 1 >= attempts) throw;
            int delay = 0;
            if (!policy.backoff_ms.empty()) {
                std::size_t i = std::min<std::size_t>(attempt, policy.backoff_ms.size() - 1);
                delay = policy.backoff_ms[i];
            }
            if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
}

} // namespace

std::shared_ptr<HttpTransport> make_httplib_transport(int timeout_seconds) {
    return std::make_shared<HttplibTransport>(timeout_seconds);
}

// ---------------------------------------------------------------------------
// Replay cache

std::string to_string(CacheMode mode) {
    switch (mode) {
    case CacheMode::live: return "live";
    case CacheMode::record: return "record";
    case CacheMode::replay: return "replay";
    }
    throw InvalidArgumentError("unknown cache mode value");
}

CacheMode cache_mode_from_string(const std::string& s) {
    if (s == "live") return CacheMode::live;
    if (s == "record") return CacheMode::record;
    if (s == "replay") return CacheMode::replay;
    throw ConfigError("unknown cache mode: " + s);
}

ReplayCache::ReplayCache(std::string root_path, CacheMode mode)
    : root_(std::move(root_path)), mode_(mode) {
    if (mode_ != CacheMode::live && root_.empty()) {
        throw ConfigError("replay cache root path required in record/replay mode");
    }
}

std::string ReplayCache::key_for(const json& canonical_request) {
    return util::sha256_hex(canonical_request.dump());
}

std::string ReplayCache::path_for(const std::string& category, const std::string& key) const {
    return (fs::path(root_) / category / (key + ".json")).string();
}

std::optional<json> ReplayCache::lookup(const std::string& category, const std::string& key) const {
    std::string path = path_for(category, key);
    if (!fs::exists(path)) return std::nullopt;
    return jsonl::parse_json(util::read_file(path), path);
}

void ReplayCache::store(const std::string& category, const std::string& key, const json& value) const {
    util::atomic_write_file(path_for(category, key), value.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Chat client

json ChatRequest::canonical() const {
    json messages_json = json::array();
    for (const auto& m : messages) {
        messages_json.push_back(json{{"role", m.role}, {"content", m.content}});
    }
    json j{{"model", model}, {"messages", messages_json}, {"temperature", temperature}};
    if (max_tokens) j["max_tokens"] = *max_tokens;
    return j;
}

namespace {

void validate_chat_request(const ChatRequest& request) {
    if (!std::isfinite(request.temperature) || request.temperature < 0) {
        throw InvalidArgumentError("chat request temperature must be finite and >= 0");
    }
    bool has_user = false;
    for (const auto& m : request.messages) {
        if (m.role == "user") has_user = true;
    }
    if (!has_user) throw InvalidArgumentError("chat request needs at least one user message");
}

ChatResponse chat_response_from_json(const json& j) {
    ChatResponse resp;
    resp.content = j.at("content").get<std::string>();
    resp.finish_reason = j.value("finish_reason", "");
    if (j.contains("usage") && !j.at("usage").is_null()) {
        const json& u = j.at("usage");
        TokenUsage usage;
        usage.prompt_tokens = u.value("prompt_tokens", 0);
        usage.completion_tokens = u.value("completion_tokens", 0);
        usage.total_tokens = u.value("total_tokens", 0);
        resp.usage = usage;
    }
    return resp;
}

json chat_response_to_json(const ChatResponse& resp) {
    json j{{"content", resp.content}, {"finish_reason", resp.finish_reason}};
    if (resp.usage) {
        j["usage"] = json{{"prompt_tokens", resp.usage->prompt_tokens},
                          {"completion_tokens", resp.usage->completion_tokens},
                          {"total_tokens", resp.usage->total_tokens}};
    }
    return j;
}

} // namespace

ChatClient::ChatClient(ChatEndpointConfig config, std::shared_ptr<HttpTransport> transport,
                       std::shared_ptr<const ReplayCache> cache)
    : config_(std::move(config)), transport_(std::move(transport)), cache_(std::move(cache)) {}

ChatResponse ChatClient::network_call(const ChatRequest& request) const {
    json body = request.canonical();
    std::vector<HttpHeader> headers;
    if (!config_.api_key.empty()) {
        headers.push_back({"Authorization", "Bearer " + config_.api_key});
    }
    HttpResponse http = with_retries(config_.retry, [&] {
        return transport_->post_json(config_.base_url + "/chat/completions", body.dump(), headers);
    });
    if (http.status < 200 || http.status >= 300) {
        throw EndpointError(http.status, http.body);
    }
    json j = jsonl::parse_json(http.body, "chat completion response");
    const json& choice = j.at("choices").at(0);
    ChatResponse resp;
    resp.content = choice.at("message").at("content").get<std::string>();
    resp.finish_reason = choice.value("finish_reason", "");
    if (j.contains("usage") && !j.at("usage").is_null()) {
        const json& u = j.at("usage");
        TokenUsage usage;
        usage.prompt_tokens = u.value("prompt_tokens", 0);
        usage.completion_tokens = u.value("completion_tokens", 0);
        usage.total_tokens = u.value("total_tokens", 0);
        resp.usage = usage;
    }
    return resp;
}

ChatResponse ChatClient::complete(const ChatRequest& request_in, UsageMeter* meter) const {
    ChatRequest request = request_in;
    if (!request.max_tokens && config_.default_max_tokens) {
        request.max_tokens = config_.default_max_tokens;
    }
    validate_chat_request(request);
    CacheMode mode = cache_ ? cache_->mode() : CacheMode::live;
    std::string key;
    if (mode != CacheMode::live) {
        key = ReplayCache::key_for(request.canonical());
    }
    if (mode == CacheMode::replay) {
        auto hit = cache_->lookup("chat", key);
        if (!hit) {
            throw ReplayMissError("no recorded chat response for key " + key);
        }
        ChatResponse resp = chat_response_from_json(*hit);
        if (meter) meter->add_llm_call();
        return resp;
    }
    ChatResponse resp = network_call(request);
    if (mode == CacheMode::record) {
        cache_->store("chat", key, chat_response_to_json(resp));
    }
    if (meter) meter->add_llm_call();
    return resp;
}

// ---------------------------------------------------------------------------
// Embedders

HttpEmbedder::HttpEmbedder(EmbeddingEndpointConfig config, std::shared_ptr<HttpTransport> transport,
                           std::shared_ptr<const ReplayCache> cache)
    : config_(std::move(config)), transport_(std::move(transport)), cache_(std::move(cache)) {}

std::vector<double> HttpEmbedder::embed(const std::string& text) {
    if (text.empty()) throw InvalidArgumentError("cannot embed empty text");
    json body{{"model", config_.model}, {"input", json::array({text})}};
    CacheMode mode = cache_ ? cache_->mode() : CacheMode::live;
    std::string key;
    if (mode != CacheMode::live) key = ReplayCache::key_for(body);

    std::vector<double> values;
    if (mode == CacheMode::replay) {
        auto hit = cache_->lookup("embed", key);
        if (!hit) throw ReplayMissError("no recorded embedding for key " + key);
        values = hit->at("vector").get<std::vector<double>>();
    } else {
        std::vector<HttpHeader> headers;
        if (!config_.api_key.empty()) {
            headers.push_back({"Authorization", "Bearer " + config_.api_key});
        }
        HttpResponse http = with_retries(config_.retry, [&] {
            return transport_->post_json(config_.base_url + "/embeddings", body.dump(), headers);
        });
        if (http.status < 200 || http.status >= 300) {
            throw EndpointError(http.status, http.body);
        }
        json j = jsonl::parse_json(http.body, "embedding response");
        values = j.at("data").at(0).at("embedding").get<std::vector<double>>();
        if (mode == CacheMode::record) {
            cache_->store("embed", key, json{{"vector", values}});
        }
    }
    if (values.empty()) throw ZeroVectorError("provider returned an empty embedding");
    bool all_zero = true;
    for (double v : values) {
        if (!std::isfinite(v)) throw ZeroVectorError("provider returned a non-finite embedding entry");
        if (v != 0.0) all_zero = false;
    }
    if (all_zero) throw ZeroVectorError("provider returned an all-zero embedding");
    return values;
}

FixtureEmbedder::FixtureEmbedder(const std::string& fixture_path) {
    for (const json& row : jsonl::read_file(fixture_path)) {
        vectors_[row.at("text").get<std::string>()] =
            row.at("vector").get<std::vector<double>>();
    }
}

void FixtureEmbedder::add(const std::string& text, std::vector<double> vector) {
    vectors_[text] = std::move(vector);
}

std::vector<double> FixtureEmbedder::embed(const std::string& text) {
    if (text.empty()) throw InvalidArgumentError("cannot embed empty text");
    auto it = vectors_.find(text);
    if (it == vectors_.end()) {
        throw ReplayMissError("fixture embedder has no vector for text: " + text);
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Cosine similarity

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw DimensionMismatchError("cosine_similarity: dimensions " + std::to_string(u.size()) +
                                     " vs " + std::to_string(v.size()));
    }
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw ZeroVectorError("cosine_similarity: zero-norm vector");
    }
    double sim = dot / (std::sqrt(nu) * std::sqrt(nv));
    if (sim > 1.0) sim = 1.0;
    if (sim < -1.0) sim = -1.0;
    return sim;
}

} // namespace jointcq
