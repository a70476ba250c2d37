#include <doctest.h>

#include "jointcq/errors.hpp"
#include "jointcq/pipeline.hpp"
#include "support/scripted_transport.hpp"

using namespace jointcq;
using namespace jointcq::testing;

TEST_CASE("aggregate_response_label is an existential over Hallucinated") {
    auto v = [](VerdictLabel label) {
        ClaimVerdict verdict;
        verdict.label = label;
        return verdict;
    };
    CHECK(aggregate_response_label({v(VerdictLabel::Correct), v(VerdictLabel::Correct)}) ==
          VerdictLabel::Correct);
    CHECK(aggregate_response_label({v(VerdictLabel::Correct), v(VerdictLabel::Hallucinated),
                                    v(VerdictLabel::Unverifiable)}) ==
          VerdictLabel::Hallucinated);
    CHECK(aggregate_response_label({}) == VerdictLabel::Unverifiable);
    CHECK(aggregate_response_label({v(VerdictLabel::Unverifiable)}) ==
          VerdictLabel::Unverifiable);
    CHECK(aggregate_response_label({v(VerdictLabel::Unverifiable), v(VerdictLabel::Correct)}) ==
          VerdictLabel::Correct);
}

TEST_CASE("efficiency_report ratios") {
    DetectionReport a;
    a.counters = UsageCounters{4, 3, 3}; // 1 generation + 3 verifications
    DetectionReport b;
    b.counters = UsageCounters{3, 2, 2};
    EfficiencyStats stats = efficiency_report({a, b});
    CHECK(stats.search_per_judgement == doctest::Approx(1.0));
    CHECK(stats.inference_per_sample == doctest::Approx(3.5));
    CHECK(stats.n_samples == 2);
    CHECK(stats.n_judgements == 5);

    EfficiencyStats empty = efficiency_report({});
    CHECK(empty.search_per_judgement == 0.0);
    CHECK(empty.inference_per_sample == 0.0);
    CHECK(empty.n_samples == 0);
}

namespace {

// A full scripted backend: generator output per qa question, search fixtures,
// cyclic verifier verdicts.
struct PipelineHarness {
    std::shared_ptr<ScriptedTransport> transport;
    std::shared_ptr<ChatClient> chat;
    std::shared_ptr<const ReplayCache> cache;
    PipelineOptions options;

    explicit PipelineHarness(ScriptedTransport::Handler handler,
                             std::shared_ptr<const ReplayCache> cache_in = nullptr)
        : transport(std::make_shared<ScriptedTransport>(std::move(handler))),
          cache(cache_in ? std::move(cache_in) : std::make_shared<ReplayCache>()) {
        chat = std::make_shared<ChatClient>(fast_chat_config(),
                                            transport, cache);
    }

    DetectionPipeline make() {
        SearchEndpointConfig search_config;
        search_config.base_url = "http://fake/search";
        search_config.retry = {1, {}};
        return DetectionPipeline(
            CqGenerator(PromptLibrary::builtin(), chat.get(), "gen"),
            SearchClient(search_config, transport, cache),
            Verifier(PromptLibrary::builtin(), chat.get(), "verify"), options);
    }
};

bool is_search(const std::string& url) { return url.find("search") != std::string::npos; }

} // namespace

TEST_CASE("detect: three claims give 3 searches, 3 judgements, 4 llm calls") {
    auto handler = [](const std::string& url, const json& body) -> HttpResponse {
        if (is_search(url)) {
            return search_ok({{"T", "S", "u"}});
        }
        std::string prompt = user_prompt(body);
        if (prompt.find("extract all claims") != std::string::npos) {
            return chat_ok("[Claims]\nA.\nB.\nC.\n[Queries]\nqa?\nqb?\nqc?\n[End]");
        }
        // verifier: label depends on the claim
        if (prompt.find("[Claim]\nA.") != std::string::npos) return chat_ok("Correct");
        if (prompt.find("[Claim]\nB.") != std::string::npos) return chat_ok("Hallucination");
        return chat_ok("Irrelevant");
    };
    PipelineHarness h(handler);
    DetectionReport report =
        h.make().detect(QAPair{"qa1", Language::en, "Q?", "A.", std::nullopt});
    REQUIRE(report.verdicts.size() == 3);
    CHECK(report.counters.search_calls == 3);
    CHECK(report.counters.judgements == 3);
    CHECK(report.counters.llm_calls == 4);
    CHECK(report.verdicts[0].label == VerdictLabel::Correct);
    CHECK(report.verdicts[1].label == VerdictLabel::Hallucinated);
    CHECK(report.verdicts[2].label == VerdictLabel::Unverifiable);
    CHECK(report.response_label == VerdictLabel::Hallucinated);
    // verdict order is claim-index order
    CHECK(report.verdicts[0].claim.index == 0);
    CHECK(report.verdicts[2].claim.index == 2);
    // evidence travels with the verdict
    CHECK(report.verdicts[0].evidence.query_text == "qa?");
}

TEST_CASE("detect: claimless qa gives an empty Unverifiable report") {
    PipelineHarness h([](const std::string& url, const json&) -> HttpResponse {
        if (is_search(url)) FAIL("no search expected");
        return chat_ok("[Claims]\nNo claims.\n[Queries]\nNo query\n[End]");
    });
    DetectionReport report =
        h.make().detect(QAPair{"qa1", Language::en, "Q?", "A.", std::nullopt});
    CHECK(report.verdicts.empty());
    CHECK(report.response_label == VerdictLabel::Unverifiable);
    CHECK(report.counters.search_calls == 0);
    CHECK(report.counters.llm_calls == 1);
}

TEST_CASE("detect: a failed search isolates to its claim") {
    auto handler = [](const std::string& url, const json& body) -> HttpResponse {
        if (is_search(url)) {
            if (body.at("q") == "qb?") throw TransportError("search down");
            return search_ok({{"T", "S", "u"}});
        }
        std::string prompt = user_prompt(body);
        if (prompt.find("extract all claims") != std::string::npos) {
            return chat_ok("[Claims]\nA.\nB.\nC.\n[Queries]\nqa?\nqb?\nqc?\n[End]");
        }
        return chat_ok("Correct");
    };
    PipelineHarness h(handler);
    DetectionReport report =
        h.make().detect(QAPair{"qa1", Language::en, "Q?", "A.", std::nullopt});
    REQUIRE(report.verdicts.size() == 3);
    CHECK(report.verdicts[0].label == VerdictLabel::Correct);
    CHECK(report.verdicts[1].label == VerdictLabel::Unverifiable);
    CHECK(report.verdicts[1].note.find("search failed") == 0);
    CHECK(report.verdicts[2].label == VerdictLabel::Correct);
    CHECK(report.counters.judgements == 3);
    CHECK(report.counters.search_calls == 2); // failed search does not count
    CHECK(report.response_label == VerdictLabel::Correct);
}

TEST_CASE("detect: generation failure after retry fails the whole sample") {
    PipelineHarness h([](const std::string&, const json&) { return chat_ok("garbage"); });
    DetectionReport report =
        h.make().detect(QAPair{"qa1", Language::en, "Q?", "A.", std::nullopt});
    CHECK(report.verdicts.empty());
    CHECK(report.response_label == VerdictLabel::Unverifiable);
    REQUIRE(report.notes.size() == 1);
    CHECK(report.notes[0].find("generation failed") == 0);
    CHECK(report.counters.llm_calls == 2);
}

TEST_CASE("detect is schedule-independent: serial and parallel agree") {
    auto handler = [](const std::string& url, const json& body) -> HttpResponse {
        if (is_search(url)) {
            return search_ok({{"T" + body.at("q").get<std::string>(), "S", "u"}});
        }
        std::string prompt = user_prompt(body);
        if (prompt.find("extract all claims") != std::string::npos) {
            return chat_ok("[Claims]\nA.\nB.\nC.\nD.\nE.\n[Queries]\nq1\nq2\nq3\nq4\nq5\n[End]");
        }
        if (prompt.find("[Claim]\nB.") != std::string::npos) return chat_ok("Hallucination");
        return chat_ok("Correct");
    };
    QAPair qa{"qa1", Language::en, "Q?", "A.", std::nullopt};

    PipelineHarness serial(handler);
    serial.options.claim_parallelism = 1;
    DetectionReport serial_report = serial.make().detect(qa);

    PipelineHarness parallel(handler);
    parallel.options.claim_parallelism = 4;
    DetectionReport parallel_report = parallel.make().detect(qa);

    json a, b;
    to_json(a, serial_report);
    to_json(b, parallel_report);
    CHECK(a.dump() == b.dump());
}

TEST_CASE("detect_all keeps input order under qa parallelism") {
    auto handler = [](const std::string& url, const json& body) -> HttpResponse {
        if (is_search(url)) return search_ok({{"T", "S", "u"}});
        std::string prompt = user_prompt(body);
        if (prompt.find("extract all claims") != std::string::npos) {
            // the claim text encodes the question so reports differ per qa
            auto pos = prompt.find("[Question]\n");
            std::string question = prompt.substr(pos + 11, 2);
            return chat_ok("[Claims]\n" + question + " claim.\n[Queries]\nq of " + question +
                           "\n[End]");
        }
        return chat_ok("Correct");
    };
    PipelineHarness h(handler);
    h.options.qa_parallelism = 4;
    std::vector<QAPair> qas;
    for (int i = 0; i < 8; ++i) {
        qas.push_back(QAPair{"qa" + std::to_string(i), Language::en,
                             "Q" + std::to_string(i) + "?", "A.", std::nullopt});
    }
    std::vector<DetectionReport> reports = h.make().detect_all(qas);
    REQUIRE(reports.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(reports[static_cast<std::size_t>(i)].qa_id == "qa" + std::to_string(i));
        CHECK(reports[static_cast<std::size_t>(i)].verdicts[0].claim.text ==
              "Q" + std::to_string(i) + " claim.");
    }
}
