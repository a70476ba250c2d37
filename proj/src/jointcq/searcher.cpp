#include "jointcq/searcher.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/util.hpp"

#include <algorithm>
#include <chrono>
#include <semaphore>
#include <thread>

namespace jointcq {

// Bounds concurrent provider calls.
class Gate {
public:
    explicit Gate(int slots) : sem_(std::max(slots, 1)) {}
    void acquire() { sem_.acquire(); }
    void release() { sem_.release(); }

private:
    std::counting_semaphore<64> sem_;
};

namespace {

struct GateGuard {
    explicit GateGuard(Gate& gate) : gate_(gate) { gate_.acquire(); }
    ~GateGuard() { gate_.release(); }
    Gate& gate_;
};

std::string flatten_ws(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return out;
}

json cache_key_body(const SearchRequest& request) {
    json j{{"query_text", request.query_text}, {"num_results", request.num_results}};
    if (request.locale) j["locale"] = *request.locale;
    return j;
}

json bundle_to_cache_json(const EvidenceBundle& bundle) {
    json j;
    to_json(j, bundle);
    return j;
}

void validate_request(const SearchRequest& request) {
    if (util::trim(request.query_text).empty()) {
        throw InvalidArgumentError("search query_text must be non-empty");
    }
    if (request.num_results < 1 || request.num_results > 10) {
        throw InvalidArgumentError("num_results must be in 1..10");
    }
}

} // namespace

std::string locale_for(Language language) {
    switch (language) {
    case Language::en: return "us/en";
    case Language::zh: return "cn/zh-cn";
    }
    throw InvalidArgumentError("unknown language value");
}

SearchClient::SearchClient(SearchEndpointConfig config, std::shared_ptr<HttpTransport> transport,
                           std::shared_ptr<const ReplayCache> cache)
    : config_(std::move(config)), transport_(std::move(transport)), cache_(std::move(cache)),
      gate_(std::make_shared<Gate>(config_.max_in_flight)) {}

std::string SearchClient::locale_for_language(Language language) const {
    auto it = config_.locale_overrides.find(to_string(language));
    if (it != config_.locale_overrides.end()) return it->second;
    return locale_for(language);
}

EvidenceBundle SearchClient::network_call(const SearchRequest& request) const {
    json body{{"q", request.query_text}, {"num", request.num_results}};
    if (request.locale) {
        auto slash = request.locale->find('/');
        if (slash == std::string::npos) {
            throw InvalidArgumentError("locale must be gl/hl: " + *request.locale);
        }
        body["gl"] = request.locale->substr(0, slash);
        body["hl"] = request.locale->substr(slash + 1);
    }
    std::vector<HttpHeader> headers;
    if (!config_.api_key.empty()) headers.push_back({"X-API-KEY", config_.api_key});

    HttpResponse http = [&] {
        GateGuard guard(*gate_);
        int attempts = std::max(config_.retry.attempts, 1);
        for (int attempt = 0;; ++attempt) {
            try {
                return transport_->post_json(config_.base_url, body.dump(), headers);
            } catch (const TransportError&) {
                if (attempt + 1 >= attempts) throw;
                int delay = 0;
                if (!config_.retry.backoff_ms.empty()) {
                    std::size_t i =
                        std::min<std::size_t>(attempt, config_.retry.backoff_ms.size() - 1);
                    delay = config_.retry.backoff_ms[i];
                }
                if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
        }
    }();
    if (http.status < 200 || http.status >= 300) {
        throw EndpointError(http.status, http.body);
    }
    json j = jsonl::parse_json(http.body, "search response");
    EvidenceBundle bundle;
    bundle.query_text = request.query_text;
    if (j.contains("organic") && j.at("organic").is_array()) {
        for (const json& item : j.at("organic")) {
            Snippet s;
            s.title = item.value("title", "");
            s.snippet = item.value("snippet", "");
            s.url = item.value("link", "");
            bundle.snippets.push_back(std::move(s));
        }
    }
    return bundle;
}

EvidenceBundle SearchClient::search(const SearchRequest& request, UsageMeter* meter) const {
    validate_request(request);
    CacheMode mode = cache_ ? cache_->mode() : CacheMode::live;
    std::string key;
    if (mode != CacheMode::live) key = ReplayCache::key_for(cache_key_body(request));

    EvidenceBundle bundle;
    if (mode == CacheMode::replay) {
        auto hit = cache_->lookup("search", key);
        if (!hit) throw ReplayMissError("no recorded search result for key " + key);
        from_json(*hit, bundle);
    } else {
        bundle = network_call(request);
        if (mode == CacheMode::record) {
            cache_->store("search", key, bundle_to_cache_json(bundle));
        }
    }

    // Truncate to the requested count and renumber ranks 1..k.
    if (static_cast<int>(bundle.snippets.size()) > request.num_results) {
        bundle.snippets.resize(static_cast<std::size_t>(request.num_results));
    }
    for (std::size_t i = 0; i < bundle.snippets.size(); ++i) {
        bundle.snippets[i].rank = static_cast<int>(i) + 1;
    }
    if (meter) meter->add_search_call();
    return bundle;
}

std::string bundle_to_reference_text(const EvidenceBundle& bundle) {
    std::string out;
    for (const Snippet& s : bundle.snippets) {
        if (!out.empty()) out += '\n';
        out += std::to_string(s.rank) + ". " + flatten_ws(s.title) + " \xE2\x80\x94 " +
               flatten_ws(s.snippet);
    }
    return out;
}

} // namespace jointcq
