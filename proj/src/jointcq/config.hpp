#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "jointcq/gateway.hpp"
#include "jointcq/searcher.hpp"
#include "jointcq/synthesis.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

// Resolved run configuration. Layering (defaults < config file < env vars <
// CLI flags) happens in the CLI; the library consumes one final JSON object.
struct Config {
    std::string workdir = ".";
    CacheMode cache_mode = CacheMode::live;
    std::string cache_dir = "cache";
    std::uint64_t seed = 17; // documented default for all seeded operations
    int qa_parallelism = 8;
    int claim_parallelism = 4;

    ChatEndpointConfig chat;
    EmbeddingEndpointConfig embedding;
    std::string embedding_provider = "http"; // http | fixture
    std::string embedding_fixture_path;
    SearchEndpointConfig search;

    std::string generator_model;
    std::string verifier_model;
    std::string synthesizer_model;
    std::string evaluator_model;
    std::vector<std::string> answer_models;

    int num_results = 10;
    bool skip_empty_evidence = true;

    SynthesisConfig synthesis;

    bool filter_short_circuit = true;
    std::int64_t filter_quota = 0; // 0 = single pass, no loop
    int filter_max_rounds = 1;
    std::string claim_examples_path;
    std::string query_examples_path;

    std::int64_t prepare_quota = 0;    // 0 = all accepted samples
    std::int64_t per_group_cap = 0;    // 0 = ceil(quota / group count)
    int split_train = 9;
    int split_validation = 1;
    std::string record_format = "chat_messages"; // or prompt_response

    double alignment_threshold = 0.5;
    std::string eval_level = "both"; // sentence | response | both
    std::string eval_mode = "both";  // main | verifiable_only | both

    std::string templates_dir;

    static Config from_json(const json& j);

    // Secrets replaced by "***"; this is what gets hashed and embedded in
    // run manifests.
    json to_masked_json() const;
    std::string config_hash() const;

    // Resolves a possibly relative path against workdir.
    std::string resolve_path(const std::string& path) const;
};

// Recursive object merge: values from overlay win, objects merge key-wise.
json merge_config(json base, const json& overlay);

// Run provenance block embedded in batch outputs.
json run_manifest(const Config& config);

extern const char* kJointcqVersion;

} // namespace jointcq
