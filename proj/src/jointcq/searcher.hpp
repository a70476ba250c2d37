#pragma once
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "jointcq/gateway.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

struct SearchRequest {
    std::string query_text;
    int num_results = 10; // provider hard cap: 10
    std::optional<std::string> locale; // "gl/hl", e.g. "us/en"
};

// "gl/hl" pair for a language; en -> us/en, zh -> cn/zh-cn.
std::string locale_for(Language language);

struct SearchEndpointConfig {
    std::string base_url = "https://google.serper.dev/search";
    std::string api_key;
    int timeout_seconds = 60;
    RetryPolicy retry;
    int max_in_flight = 5; // provider-quota guard
    std::map<std::string, std::string> locale_overrides; // language -> "gl/hl"
};

// Serper-compatible search client with record/replay. One successful call
// increments search_calls by exactly 1 regardless of how many results come
// back; an empty organic list is an empty bundle, not an error.
class SearchClient {
public:
    SearchClient(SearchEndpointConfig config, std::shared_ptr<HttpTransport> transport,
                 std::shared_ptr<const ReplayCache> cache);

    EvidenceBundle search(const SearchRequest& request, UsageMeter* meter = nullptr) const;

    std::string locale_for_language(Language language) const;

private:
    EvidenceBundle network_call(const SearchRequest& request) const;

    SearchEndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<const ReplayCache> cache_;
    mutable std::shared_ptr<class Gate> gate_;
};

// Numbered "<rank>. <title> — <snippet>" lines for the verifier's reference
// slot. Embedded newlines are flattened to spaces; URLs are omitted.
std::string bundle_to_reference_text(const EvidenceBundle& bundle);

} // namespace jointcq
