#pragma once
#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jointcq/types.hpp"

namespace jointcq {

// ---------------------------------------------------------------------------
// Usage accounting. Counters only move forward; snapshot() is a consistent
// read for reporting.

class UsageMeter {
public:
    void add_llm_call() { llm_calls_.fetch_add(1, std::memory_order_relaxed); }
    void add_search_call() { search_calls_.fetch_add(1, std::memory_order_relaxed); }
    void add_judgement() { judgements_.fetch_add(1, std::memory_order_relaxed); }

    UsageCounters snapshot() const {
        return UsageCounters{llm_calls_.load(std::memory_order_relaxed),
                             search_calls_.load(std::memory_order_relaxed),
                             judgements_.load(std::memory_order_relaxed)};
    }

private:
    std::atomic<std::int64_t> llm_calls_{0};
    std::atomic<std::int64_t> search_calls_{0};
    std::atomic<std::int64_t> judgements_{0};
};

// ---------------------------------------------------------------------------
// Transport abstraction. Production uses cpp-httplib; tests inject scripted
// responders. Implementations must be safe to call from multiple threads.

struct HttpResponse {
    int status = 0;
    std::string body;
};

struct HttpHeader {
    std::string name;
    std::string value;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws TransportError on connection-level failure.
    virtual HttpResponse post_json(const std::string& url, const std::string& body,
                                   const std::vector<HttpHeader>& headers) = 0;
};

std::shared_ptr<HttpTransport> make_httplib_transport(int timeout_seconds);

// ---------------------------------------------------------------------------
// Content-addressed record/replay store. Key = SHA-256 of the canonical JSON
// of the request. In replay mode a miss is an error, never a network call.

enum class CacheMode { live, record, replay };

std::string to_string(CacheMode mode);
CacheMode cache_mode_from_string(const std::string& s);

class ReplayCache {
public:
    ReplayCache() = default; // live mode, no root
    ReplayCache(std::string root_path, CacheMode mode);

    CacheMode mode() const { return mode_; }
    const std::string& root() const { return root_; }

    static std::string key_for(const json& canonical_request);

    std::optional<json> lookup(const std::string& category, const std::string& key) const;
    void store(const std::string& category, const std::string& key, const json& value) const;

private:
    std::string path_for(const std::string& category, const std::string& key) const;

    std::string root_;
    CacheMode mode_ = CacheMode::live;
};

// ---------------------------------------------------------------------------
// Chat completion client (OpenAI-compatible wire format).

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<int> max_tokens;

    // Canonical JSON (sorted keys, optionals omitted); also the cache-key input.
    json canonical() const;

    bool operator==(const ChatRequest&) const = default;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    std::optional<TokenUsage> usage;
};

struct RetryPolicy {
    int attempts = 3;
    std::vector<int> backoff_ms = {1000, 2000, 4000};
};

struct ChatEndpointConfig {
    std::string base_url; // e.g. https://api.openai.com/v1
    std::string api_key;
    int timeout_seconds = 60;
    RetryPolicy retry;
    // Applied to requests that do not set max_tokens themselves; absent
    // means the provider default.
    std::optional<int> default_max_tokens;
};

class ChatClient {
public:
    ChatClient(ChatEndpointConfig config, std::shared_ptr<HttpTransport> transport,
               std::shared_ptr<const ReplayCache> cache);

    // One logical call: retries are internal and count once. Increments
    // meter->llm_calls on every successful network or replayed call.
    ChatResponse complete(const ChatRequest& request, UsageMeter* meter = nullptr) const;

private:
    ChatResponse network_call(const ChatRequest& request) const;

    ChatEndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<const ReplayCache> cache_;
};

// ---------------------------------------------------------------------------
// Text embeddings.

class Embedder {
public:
    virtual ~Embedder() = default;
    // Throws InvalidArgumentError on empty text, ZeroVectorError on an
    // all-zero provider response.
    virtual std::vector<double> embed(const std::string& text) = 0;
};

struct EmbeddingEndpointConfig {
    std::string base_url;
    std::string api_key;
    std::string model = "paraphrase-multilingual-mpnet-base-v2";
    int timeout_seconds = 60;
    RetryPolicy retry;
};

class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(EmbeddingEndpointConfig config, std::shared_ptr<HttpTransport> transport,
                 std::shared_ptr<const ReplayCache> cache);

    std::vector<double> embed(const std::string& text) override;

private:
    EmbeddingEndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<const ReplayCache> cache_;
};

// Deterministic offline provider backed by a JSONL file of
// {"text": ..., "vector": [...]} rows. Unknown text is an error.
class FixtureEmbedder : public Embedder {
public:
    explicit FixtureEmbedder(const std::string& fixture_path);
    FixtureEmbedder() = default;

    void add(const std::string& text, std::vector<double> vector);
    std::vector<double> embed(const std::string& text) override;

private:
    std::map<std::string, std::vector<double>> vectors_;
};

// dot(u,v)/(|u||v|), clamped to [-1,1]. Throws DimensionMismatchError or
// ZeroVectorError.
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

} // namespace jointcq
