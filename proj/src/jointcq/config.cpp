#include "jointcq/config.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <filesystem>

namespace jointcq {

const char* kJointcqVersion = "0.1.0";

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

RetryPolicy retry_from(const json& j) {
    RetryPolicy policy;
    read_into(j, "retries", policy.attempts);
    read_into(j, "backoff_ms", policy.backoff_ms);
    return policy;
}

} // namespace

Config Config::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    Config c;
    read_into(j, "workdir", c.workdir);
    if (j.contains("cache")) {
        const json& cache = j.at("cache");
        std::string mode = "live";
        read_into(cache, "mode", mode);
        c.cache_mode = cache_mode_from_string(mode);
        read_into(cache, "dir", c.cache_dir);
    }
    read_into(j, "seed", c.seed);
    if (j.contains("parallelism")) {
        read_into(j.at("parallelism"), "qa", c.qa_parallelism);
        read_into(j.at("parallelism"), "claims", c.claim_parallelism);
    }
    if (c.qa_parallelism < 1 || c.claim_parallelism < 1) {
        throw ConfigError("parallelism values must be >= 1");
    }

    if (j.contains("chat")) {
        const json& chat = j.at("chat");
        read_into(chat, "base_url", c.chat.base_url);
        read_into(chat, "api_key", c.chat.api_key);
        read_into(chat, "timeout_s", c.chat.timeout_seconds);
        if (chat.contains("max_tokens") && !chat.at("max_tokens").is_null()) {
            c.chat.default_max_tokens = chat.at("max_tokens").get<int>();
            if (*c.chat.default_max_tokens < 1) {
                throw ConfigError("chat.max_tokens must be positive");
            }
        }
        c.chat.retry = retry_from(chat);
    }
    if (j.contains("embedding")) {
        const json& emb = j.at("embedding");
        read_into(emb, "provider", c.embedding_provider);
        read_into(emb, "base_url", c.embedding.base_url);
        read_into(emb, "api_key", c.embedding.api_key);
        read_into(emb, "model", c.embedding.model);
        read_into(emb, "timeout_s", c.embedding.timeout_seconds);
        read_into(emb, "fixture_path", c.embedding_fixture_path);
        c.embedding.retry = retry_from(emb);
        if (c.embedding_provider != "http" && c.embedding_provider != "fixture") {
            throw ConfigError("embedding.provider must be http or fixture");
        }
    }
    if (j.contains("search")) {
        const json& search = j.at("search");
        read_into(search, "base_url", c.search.base_url);
        read_into(search, "api_key", c.search.api_key);
        read_into(search, "timeout_s", c.search.timeout_seconds);
        read_into(search, "max_in_flight", c.search.max_in_flight);
        read_into(search, "num_results", c.num_results);
        read_into(search, "locale_overrides", c.search.locale_overrides);
        c.search.retry = retry_from(search);
    }
    if (c.num_results < 1 || c.num_results > 10) {
        throw ConfigError("search.num_results must be in 1..10");
    }

    if (j.contains("models")) {
        const json& models = j.at("models");
        read_into(models, "generator", c.generator_model);
        read_into(models, "verifier", c.verifier_model);
        read_into(models, "synthesizer", c.synthesizer_model);
        read_into(models, "evaluator", c.evaluator_model);
        read_into(models, "answer_models", c.answer_models);
    }
    if (j.contains("detect")) {
        read_into(j.at("detect"), "skip_empty_evidence", c.skip_empty_evidence);
    }
    if (j.contains("synthesis")) {
        const json& syn = j.at("synthesis");
        read_into(syn, "claim_temperature", c.synthesis.claim_temperature);
        read_into(syn, "query_temperature", c.synthesis.query_temperature);
        read_into(syn, "answer_temperature", c.synthesis.answer_temperature);
        read_into(syn, "shots", c.synthesis.shots);
        if (c.synthesis.shots < 1) throw ConfigError("synthesis.shots must be >= 1");
        if (c.synthesis.claim_temperature < 0 || c.synthesis.query_temperature < 0 ||
            c.synthesis.answer_temperature < 0) {
            throw ConfigError("synthesis temperatures must be >= 0");
        }
    }
    c.synthesis.seed = c.seed;
    if (j.contains("filter")) {
        const json& filter = j.at("filter");
        read_into(filter, "short_circuit", c.filter_short_circuit);
        read_into(filter, "quota", c.filter_quota);
        read_into(filter, "max_rounds", c.filter_max_rounds);
        read_into(filter, "claim_examples", c.claim_examples_path);
        read_into(filter, "query_examples", c.query_examples_path);
        if (c.filter_max_rounds < 1) throw ConfigError("filter.max_rounds must be >= 1");
    }
    if (j.contains("prepare")) {
        const json& prep = j.at("prepare");
        read_into(prep, "quota", c.prepare_quota);
        read_into(prep, "per_group_cap", c.per_group_cap);
        if (prep.contains("split")) {
            const json& split = prep.at("split");
            if (!split.is_array() || split.size() != 2) {
                throw ConfigError("prepare.split must be [train, validation]");
            }
            c.split_train = split.at(0).get<int>();
            c.split_validation = split.at(1).get<int>();
        }
        read_into(prep, "format", c.record_format);
        if (c.record_format != "chat_messages" && c.record_format != "prompt_response") {
            throw ConfigError("prepare.format must be chat_messages or prompt_response");
        }
    }
    if (j.contains("evaluate")) {
        const json& ev = j.at("evaluate");
        read_into(ev, "threshold", c.alignment_threshold);
        if (c.alignment_threshold < 0.0 || c.alignment_threshold > 1.0) {
            throw ConfigError("evaluate.threshold must be in [0, 1]");
        }
        read_into(ev, "level", c.eval_level);
        read_into(ev, "mode", c.eval_mode);
        if (c.eval_level != "both" && c.eval_level != "sentence" && c.eval_level != "response") {
            throw ConfigError("evaluate.level must be sentence, response or both");
        }
        if (c.eval_mode == "verifiable-only") c.eval_mode = "verifiable_only";
        if (c.eval_mode != "both" && c.eval_mode != "main" && c.eval_mode != "verifiable_only") {
            throw ConfigError("evaluate.mode must be main, verifiable_only or both");
        }
    }
    read_into(j, "templates_dir", c.templates_dir);
    return c;
}

json Config::to_masked_json() const {
    auto mask = [](const std::string& secret) { return secret.empty() ? "" : "***"; };
    return json{
        {"workdir", workdir},
        {"cache", json{{"mode", to_string(cache_mode)}, {"dir", cache_dir}}},
        {"seed", seed},
        {"parallelism", json{{"qa", qa_parallelism}, {"claims", claim_parallelism}}},
        {"chat", json{{"base_url", chat.base_url},
                      {"api_key", mask(chat.api_key)},
                      {"timeout_s", chat.timeout_seconds},
                      {"retries", chat.retry.attempts},
                      {"backoff_ms", chat.retry.backoff_ms},
                      {"max_tokens", chat.default_max_tokens ? json(*chat.default_max_tokens)
                                                             : json(nullptr)}}},
        {"embedding", json{{"provider", embedding_provider},
                           {"base_url", embedding.base_url},
                           {"api_key", mask(embedding.api_key)},
                           {"model", embedding.model},
                           {"fixture_path", embedding_fixture_path}}},
        {"search", json{{"base_url", search.base_url},
                        {"api_key", mask(search.api_key)},
                        {"num_results", num_results},
                        {"max_in_flight", search.max_in_flight},
                        {"locale_overrides", search.locale_overrides}}},
        {"models", json{{"generator", generator_model},
                        {"verifier", verifier_model},
                        {"synthesizer", synthesizer_model},
                        {"evaluator", evaluator_model},
                        {"answer_models", answer_models}}},
        {"detect", json{{"skip_empty_evidence", skip_empty_evidence}}},
        {"synthesis", json{{"claim_temperature", synthesis.claim_temperature},
                           {"query_temperature", synthesis.query_temperature},
                           {"answer_temperature", synthesis.answer_temperature},
                           {"shots", synthesis.shots}}},
        {"filter", json{{"short_circuit", filter_short_circuit},
                        {"quota", filter_quota},
                        {"max_rounds", filter_max_rounds},
                        {"claim_examples", claim_examples_path},
                        {"query_examples", query_examples_path}}},
        {"prepare", json{{"quota", prepare_quota},
                         {"per_group_cap", per_group_cap},
                         {"split", json::array({split_train, split_validation})},
                         {"format", record_format}}},
        {"evaluate", json{{"threshold", alignment_threshold},
                          {"level", eval_level},
                          {"mode", eval_mode}}},
        {"templates_dir", templates_dir},
    };
}

std::string Config::config_hash() const {
    return util::sha256_hex(to_masked_json().dump());
}

std::string Config::resolve_path(const std::string& path) const {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(workdir) / p).lexically_normal().string();
}

json merge_config(json base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) return overlay;
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            base[it.key()] = merge_config(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
    return base;
}

json run_manifest(const Config& config) {
    return json{{"config_hash", config.config_hash()},
                {"cache_mode", to_string(config.cache_mode)},
                {"models", json{{"generator", config.generator_model},
                                {"verifier", config.verifier_model},
                                {"synthesizer", config.synthesizer_model},
                                {"evaluator", config.evaluator_model}}},
                {"seed", config.seed},
                {"version", kJointcqVersion}};
}

} // namespace jointcq
