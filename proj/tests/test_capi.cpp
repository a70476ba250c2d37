#include <doctest.h>

// Exercises the shared-library surface the way an external consumer would:
// only jointcq.h plus the C functions.
#include "jointcq.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("jointcq_capi_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

void write_lines(const std::string& path, const std::vector<json>& rows) {
    std::ofstream out(path);
    for (const json& row : rows) out << row.dump() << "\n";
}

struct ContextGuard {
    jointcq_context* ctx = nullptr;
    explicit ContextGuard(const json& config) {
        REQUIRE(jointcq_context_create(config.dump().c_str(), &ctx) == JOINTCQ_OK);
    }
    ~ContextGuard() { jointcq_context_free(ctx); }
};

} // namespace

TEST_CASE("version and last_error are always valid strings") {
    CHECK(std::string(jointcq_version()) == "0.1.0");
    CHECK(jointcq_last_error() != nullptr);
}

TEST_CASE("context creation validates the config document") {
    jointcq_context* ctx = nullptr;
    CHECK(jointcq_context_create("not json", &ctx) == JOINTCQ_ERR_IO);
    CHECK(ctx == nullptr);
    CHECK(jointcq_context_create("{\"cache\":{\"mode\":\"bogus\"}}", &ctx) ==
          JOINTCQ_ERR_CONFIG);
    CHECK(std::string(jointcq_last_error()).find("cache mode") != std::string::npos);
    CHECK(jointcq_context_create(nullptr, &ctx) == JOINTCQ_ERR_INVALID_ARG);
    CHECK(jointcq_context_create("{}", &ctx) == JOINTCQ_OK);
    REQUIRE(ctx != nullptr);
    jointcq_context_free(ctx);
}

TEST_CASE("cosine similarity through the C surface") {
    double out = 0.0;
    const double u[] = {1.0, 2.0, 2.0};
    const double v[] = {2.0, 1.0, 2.0};
    REQUIRE(jointcq_cosine_similarity(u, v, 3, &out) == JOINTCQ_OK);
    CHECK(std::abs(out - 8.0 / 9.0) < 1e-12);
    const double zero[] = {0.0, 0.0, 0.0};
    CHECK(jointcq_cosine_similarity(u, zero, 3, &out) == JOINTCQ_ERR_INTERNAL);
    CHECK(jointcq_cosine_similarity(nullptr, v, 3, &out) == JOINTCQ_ERR_INVALID_ARG);
}

TEST_CASE("verdict parsing through the C surface") {
    int label = -1;
    REQUIRE(jointcq_parse_verdict("Correct", "en", &label) == JOINTCQ_OK);
    CHECK(label == 0);
    REQUIRE(jointcq_parse_verdict("幻觉", "zh", &label) == JOINTCQ_OK);
    CHECK(label == 1);
    REQUIRE(jointcq_parse_verdict("no idea", "en", &label) == JOINTCQ_OK);
    CHECK(label == 2);
    CHECK(jointcq_parse_verdict("Correct", "klingon", &label) == JOINTCQ_ERR_INVALID_ARG);
}

TEST_CASE("detect via the C API in replay mode fails cleanly on a cold cache") {
    std::string dir = fresh_dir("replay_miss");
    write_lines(dir + "/qa.jsonl", {json{{"id", "qa0"},
                                         {"language", "en"},
                                         {"question", "Q?"},
                                         {"answer", "A."}}});
    json config{{"workdir", dir},
                {"cache", {{"mode", "replay"}, {"dir", "cache"}}},
                {"models", {{"generator", "g"}, {"verifier", "v"}}}};
    ContextGuard guard(config);
    // Generation degrades to a failed sample on replay miss; detect reports
    // partial failure rather than crashing.
    jointcq_status status = jointcq_detect(guard.ctx, "qa.jsonl", "out");
    CHECK(status == JOINTCQ_ERR_PARTIAL);
    CHECK(fs::exists(dir + "/out/reports.jsonl"));
}

TEST_CASE("prepare via the C API") {
    std::string dir = fresh_dir("prepare");
    std::vector<json> accepted;
    for (int i = 0; i < 10; ++i) {
        int claims = i % 2 + 1;
        json claim_array = json::array();
        json query_array = json::array();
        for (int c = 0; c < claims; ++c) {
            claim_array.push_back(json{{"index", c}, {"text", "Claim " + std::to_string(i) + "-" +
                                                                  std::to_string(c) + "."}});
            query_array.push_back(json{{"index", c}, {"text", "query " + std::to_string(i)}});
        }
        accepted.push_back(json{{"qa", json{{"id", "qa" + std::to_string(i)},
                                            {"language", "en"},
                                            {"question", "Q" + std::to_string(i) + "?"},
                                            {"answer", "A" + std::to_string(i) + "."}}},
                                {"claims", claim_array},
                                {"queries", query_array}});
    }
    write_lines(dir + "/accepted.jsonl", accepted);
    json config{{"workdir", dir},
                {"seed", 3},
                {"prepare", {{"quota", 10}, {"split", json::array({9, 1})}}}};
    ContextGuard guard(config);
    REQUIRE(jointcq_prepare(guard.ctx, "accepted.jsonl", "dataset") == JOINTCQ_OK);
    CHECK(fs::exists(dir + "/dataset/train.jsonl"));
    CHECK(fs::exists(dir + "/dataset/valid.jsonl"));
    CHECK(fs::exists(dir + "/dataset/manifest.json"));
    // 9:1 of 10
    int train_lines = 0;
    std::ifstream in(dir + "/dataset/train.jsonl");
    std::string line;
    while (std::getline(in, line)) train_lines += line.empty() ? 0 : 1;
    CHECK(train_lines == 9);
}

TEST_CASE("evaluate via the C API with a fixture embedder") {
    std::string dir = fresh_dir("evaluate");
    write_lines(dir + "/reports.jsonl",
                {json{{"qa_id", "qa0"},
                      {"verdicts",
                       json::array({json{{"claim", {{"index", 0}, {"text", "claim zero"}}},
                                         {"label", "hallucinated"},
                                         {"raw_model_output", "Hallucination"},
                                         {"evidence", {{"query_text", "q"}, {"snippets", json::array()}}},
                                         {"note", ""}}})},
                      {"response_label", "hallucinated"},
                      {"counters", {{"llm_calls", 2}, {"search_calls", 1}, {"judgements", 1}}},
                      {"notes", json::array()}}});
    write_lines(dir + "/gold.jsonl",
                {json{{"qa_id", "qa0"},
                      {"sentences", json::array({json{{"text", "sentence zero"},
                                                      {"gold_hallucinated", true}}})},
                      {"gold_response_hallucinated", true}}});
    write_lines(dir + "/embeddings.jsonl",
                {json{{"text", "sentence zero"}, {"vector", json::array({1.0, 0.0})}},
                 json{{"text", "claim zero"}, {"vector", json::array({0.9, 0.1})}}});
    json config{{"workdir", dir},
                {"embedding", {{"provider", "fixture"}, {"fixture_path", "embeddings.jsonl"}}}};
    ContextGuard guard(config);
    REQUIRE(jointcq_evaluate(guard.ctx, "reports.jsonl", "gold.jsonl", "out") == JOINTCQ_OK);
    std::ifstream in(dir + "/out/metrics.json");
    json metrics = json::parse(in);
    CHECK(metrics.at("sentence").at("main").at("accuracy") == 1.0);
    CHECK(metrics.at("response").at("main").at("f1_hallucination") == 1.0);
}
