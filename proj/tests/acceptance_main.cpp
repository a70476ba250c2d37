// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "jointcq/config.hpp"
#include "jointcq/cq_generator.hpp"
#include "jointcq/criteria_filter.hpp"
#include "jointcq/dataset_prep.hpp"
#include "jointcq/eval.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/pipeline.hpp"
#include "jointcq/runner.hpp"
#include "jointcq/util.hpp"
#include "support/generators.hpp"
#include "support/scripted_transport.hpp"

using namespace jointcq;
using namespace jointcq::testing;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::function<bool(std::string&)> run;
    double time_limit_s = 0.0; // 0 = no limit
};

std::string fresh_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("jointcq_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = static_cast<double>(rng() % 20001) / 10000.0 - 1.0;
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

// ---------------------------------------------------------------------------
// 1. Parser round-trip

bool criterion_parser_roundtrip(std::string& detail) {
    std::mt19937_64 rng(20250801);
    int failures = 0;
    for (int iter = 0; iter < 200; ++iter) {
        Language language = iter % 2 == 0 ? Language::en : Language::zh;
        ClaimQuerySet set = random_claim_query_set(rng, 10);
        std::string rendered = render_joint_output(set.pairs, language);
        try {
            ClaimQuerySet parsed = parse_joint_output(rendered, language);
            if (!(parsed.pairs == set.pairs)) ++failures;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    detail = "200 render->parse round-trips (en+zh, 0-10 pairs), " +
             std::to_string(failures) + " failures";
    return failures == 0;
}

// ---------------------------------------------------------------------------
// 2. Alignment oracle

AlignmentMap oracle_align(const std::vector<std::vector<double>>& sentences,
                          const std::vector<std::vector<double>>& claims, double threshold) {
    AlignmentMap map;
    for (std::size_t c = 0; c < claims.size(); ++c) {
        double best = -2.0;
        int best_idx = -1;
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            double sim = cosine_similarity(sentences[s], claims[c]);
            if (sim > best) { // strict >: ties keep the lowest sentence index
                best = sim;
                best_idx = static_cast<int>(s);
            }
        }
        if (best_idx >= 0 && best >= threshold) {
            map.assignments[best_idx].push_back(static_cast<int>(c));
        } else {
            map.unaligned_claims.push_back(static_cast<int>(c));
        }
    }
    return map;
}

struct AlignmentInstance {
    std::vector<std::vector<double>> sentences;
    std::vector<std::vector<double>> claims;
};

std::vector<AlignmentInstance> alignment_instances(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<AlignmentInstance> out;
    for (int i = 0; i < count; ++i) {
        AlignmentInstance inst;
        std::size_t n_sentences = 1 + rng() % 10;
        std::size_t n_claims = rng() % 11;
        std::size_t dim = 2 + rng() % 6;
        for (std::size_t s = 0; s < n_sentences; ++s)
            inst.sentences.push_back(random_unit_vector(rng, dim));
        for (std::size_t c = 0; c < n_claims; ++c)
            inst.claims.push_back(random_unit_vector(rng, dim));
        out.push_back(std::move(inst));
    }
    return out;
}

bool criterion_alignment_oracle(std::string& detail) {
    int mismatches = 0;
    for (const AlignmentInstance& inst : alignment_instances(97, 500)) {
        AlignmentMap ours = align_claims_vectors(inst.sentences, inst.claims, 0.5);
        AlignmentMap oracle = oracle_align(inst.sentences, inst.claims, 0.5);
        if (!(ours == oracle)) ++mismatches;
    }
    detail = "500 random instances vs brute-force argmax oracle, " +
             std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// ---------------------------------------------------------------------------
// 3. Aggregation truth table

bool criterion_aggregation_truth_table(std::string& detail) {
    const std::vector<VerdictLabel> labels = {VerdictLabel::Correct, VerdictLabel::Hallucinated,
                                              VerdictLabel::Unverifiable};
    long long checked = 0;
    long long failures = 0;
    for (int n_sentences = 1; n_sentences <= 3; ++n_sentences) {
        for (int n_claims = 0; n_claims <= 3; ++n_claims) {
            // assignment code: per claim, 0..n_sentences-1 = that sentence,
            // n_sentences = unaligned
            int assign_space = 1;
            for (int c = 0; c < n_claims; ++c) assign_space *= n_sentences + 1;
            int label_space = 1;
            for (int c = 0; c < n_claims; ++c) label_space *= 3;
            for (int a = 0; a < assign_space; ++a) {
                for (int l = 0; l < label_space; ++l) {
                    AlignmentMap map;
                    std::vector<ClaimVerdict> verdicts;
                    std::vector<int> claim_sentence(static_cast<std::size_t>(n_claims));
                    int acode = a, lcode = l;
                    for (int c = 0; c < n_claims; ++c) {
                        int slot = acode % (n_sentences + 1);
                        acode /= n_sentences + 1;
                        claim_sentence[static_cast<std::size_t>(c)] = slot;
                        if (slot < n_sentences) {
                            map.assignments[slot].push_back(c);
                        } else {
                            map.unaligned_claims.push_back(c);
                        }
                        ClaimVerdict v;
                        v.claim = Claim{c, "c" + std::to_string(c)};
                        v.label = labels[static_cast<std::size_t>(lcode % 3)];
                        lcode /= 3;
                        verdicts.push_back(std::move(v));
                    }

                    // Formula oracles: H(s_i) = I[∃ c in C(s_i): h(c)=1],
                    // H(r) = I[∃ s: H(s)=1].
                    std::vector<bool> formula_h(static_cast<std::size_t>(n_sentences), false);
                    std::vector<bool> any_correct(static_cast<std::size_t>(n_sentences), false);
                    bool any_hallucinated_claim = false;
                    bool any_correct_claim = false;
                    for (int c = 0; c < n_claims; ++c) {
                        VerdictLabel label = verdicts[static_cast<std::size_t>(c)].label;
                        any_hallucinated_claim =
                            any_hallucinated_claim || label == VerdictLabel::Hallucinated;
                        any_correct_claim = any_correct_claim || label == VerdictLabel::Correct;
                        int slot = claim_sentence[static_cast<std::size_t>(c)];
                        if (slot < n_sentences) {
                            if (label == VerdictLabel::Hallucinated)
                                formula_h[static_cast<std::size_t>(slot)] = true;
                            if (label == VerdictLabel::Correct)
                                any_correct[static_cast<std::size_t>(slot)] = true;
                        }
                    }

                    for (ScoringMode mode : {ScoringMode::main, ScoringMode::verifiable_only}) {
                        auto preds = sentence_predictions(
                            map, verdicts, static_cast<std::size_t>(n_sentences), mode);
                        for (int s = 0; s < n_sentences; ++s) {
                            ++checked;
                            std::optional<bool> expected;
                            bool h = formula_h[static_cast<std::size_t>(s)];
                            bool unverifiable = !h && !any_correct[static_cast<std::size_t>(s)];
                            if (mode == ScoringMode::main) {
                                expected = h; // unverifiable scores as no hallucination
                            } else {
                                expected = unverifiable ? std::optional<bool>() : std::optional<bool>(h);
                            }
                            if (preds[static_cast<std::size_t>(s)] != expected) ++failures;
                        }
                    }

                    // Response level via claims.
                    ++checked;
                    VerdictLabel aggregated = aggregate_response_label(verdicts);
                    VerdictLabel expected_aggregate =
                        any_hallucinated_claim
                            ? VerdictLabel::Hallucinated
                            : (any_correct_claim ? VerdictLabel::Correct
                                                 : VerdictLabel::Unverifiable);
                    if (aggregated != expected_aggregate) ++failures;

                    // Hierarchy: with every claim aligned, H(r) via sentences
                    // equals the claim-level existential.
                    if (map.unaligned_claims.empty()) {
                        ++checked;
                        bool hr_sentences = false;
                        for (bool h : formula_h) hr_sentences = hr_sentences || h;
                        bool hr_claims = aggregated == VerdictLabel::Hallucinated;
                        if (hr_sentences != hr_claims) ++failures;
                    }
                }
            }
        }
    }
    detail = std::to_string(checked) + " truth-table entries (<=3 claims x <=3 sentences, both modes), " +
             std::to_string(failures) + " mismatches";
    return failures == 0;
}

// ---------------------------------------------------------------------------
// 4. Metric fixtures

bool criterion_metric_fixtures(std::string& detail) {
    std::vector<std::optional<bool>> pred = {true, false, true, false, true};
    std::vector<bool> gold = {true, true, true, false, false};
    MetricsSummary m = compute_metrics(pred, gold, EvalLevel::sentence, ScoringMode::main);
    bool metrics_ok = std::abs(m.accuracy - 0.600000) <= 1e-9 &&
                      std::abs(m.f1_hallucination - 2.0 / 3.0) <= 1e-9;

    auto rate_pct = [](std::int64_t passed, std::int64_t total) {
        std::vector<CriterionResult> results;
        for (std::int64_t i = 0; i < total; ++i) {
            results.push_back({CriterionKind::Decontextualization, "s", i < passed, ""});
        }
        FilterStats stats = filter_stats(results);
        return std::llround(stats.of(CriterionKind::Decontextualization).pass_rate * 10000.0) /
               100.0;
    };
    bool stats_ok = rate_pct(2472, 4000) == 61.80 && rate_pct(3843, 4000) == 96.08 &&
                    rate_pct(29216, 29444) == 99.23;
    detail = "confusion fixture acc=" + std::to_string(m.accuracy) +
             " f1=" + std::to_string(m.f1_hallucination) +
             "; published pass rates reproduced to 2dp: " + (stats_ok ? "yes" : "no");
    return metrics_ok && stats_ok;
}

// ---------------------------------------------------------------------------
// Scripted detection backend shared by criteria 5 and 7. Claim count per QA
// is keyed by the question's index tag.

ScriptedTransport::Handler detection_backend() {
    return [](const std::string& url, const json& body) -> HttpResponse {
        if (url.find("search") != std::string::npos) {
            std::string q = body.at("q").get<std::string>();
            return search_ok({{"Title " + q, "Snippet about " + q, "https://x/1"},
                              {"More " + q, "Second snippet " + q, "https://x/2"}});
        }
        std::string prompt = user_prompt(body);
        auto claims_for = [](int index) { return index % 5 + 1; };
        if (prompt.find("extract all claims") != std::string::npos) {
            auto pos = prompt.find("[Question]\nQuestion ");
            int index = std::stoi(prompt.substr(pos + 20));
            int n = claims_for(index);
            std::string claims, queries;
            for (int c = 0; c < n; ++c) {
                claims += "Claim " + std::to_string(index) + "-" + std::to_string(c) +
                          " about topic.\n";
                queries += "query " + std::to_string(index) + "-" + std::to_string(c) + "\n";
            }
            return chat_ok("[Claims]\n" + claims + "[Queries]\n" + queries + "[End]");
        }
        // verifier: deterministic label from the claim text
        auto pos = prompt.find("[Claim]\nClaim ");
        std::string tail = prompt.substr(pos + 14);
        int index = std::stoi(tail);
        int c = std::stoi(tail.substr(tail.find('-') + 1));
        switch ((index + c) % 3) {
        case 0: return chat_ok("Correct");
        case 1: return chat_ok("Hallucination");
        default: return chat_ok("Irrelevant");
        }
    };
}

void write_qa_corpus(const std::string& path, int n) {
    std::vector<json> rows;
    for (int i = 0; i < n; ++i) {
        rows.push_back(json{{"id", "qa" + std::to_string(i)},
                            {"language", "en"},
                            {"question", "Question " + std::to_string(i) + "?"},
                            {"answer", "Answer " + std::to_string(i) + "."}});
    }
    jsonl::write_file(path, rows);
}

Config detection_config(const std::string& workdir) {
    json j{{"workdir", workdir},
           {"cache", {{"mode", "record"}, {"dir", "cache"}}},
           {"chat", {{"base_url", "http://fake/v1"}, {"retries", 1}, {"backoff_ms", json::array()}}},
           {"search", {{"base_url", "http://fake/search"}, {"retries", 1}, {"backoff_ms", json::array()}}},
           {"models", {{"generator", "gen"}, {"verifier", "ver"}}}};
    return Config::from_json(j);
}

// ---------------------------------------------------------------------------
// 5. Efficiency accounting

bool criterion_efficiency_accounting(std::string& detail) {
    std::string dir = fresh_dir("efficiency");
    write_qa_corpus(dir + "/qa.jsonl", 20);
    Config config = detection_config(dir);

    // Record against the scripted backend, then replay network-silent.
    auto transport = std::make_shared<ScriptedTransport>(detection_backend());
    runner::detect_file(config, "qa.jsonl", "out_record", transport);

    config.cache_mode = CacheMode::replay;
    auto strict = std::make_shared<StrictTransport>();
    auto summary = runner::detect_file(config, "qa.jsonl", "out_replay", strict);

    // 20 QAs with claim counts 1..5 cycling: total 60 claims, mean 3.
    double expected_inference = 1.0 + 60.0 / 20.0;
    bool ok = strict->hits.load() == 0 && summary.n_failed == 0 &&
              summary.efficiency.search_per_judgement == 1.0 &&
              summary.efficiency.inference_per_sample == expected_inference &&
              summary.efficiency.n_judgements == 60 && summary.efficiency.n_samples == 20;
    detail = "search/judgement = " + std::to_string(summary.efficiency.search_per_judgement) +
             " (exact 1.0), inference/sample = " +
             std::to_string(summary.efficiency.inference_per_sample) + " (exact " +
             std::to_string(expected_inference) + "), no network in replay";
    return ok;
}

// ---------------------------------------------------------------------------
// 6. Protocol dispatch

bool criterion_protocol_dispatch(std::string& detail) {
    auto transport = std::make_shared<ScriptedTransport>(
        [](const std::string&, const json&) { return chat_ok("Yes"); });
    auto chat = std::make_shared<ChatClient>(
        fast_chat_config(), transport,
        std::make_shared<ReplayCache>());
    CriteriaFilter filter(PromptLibrary::builtin(), chat.get(), "eval");

    QAPair qa{"qa1", Language::en, "Q?", "A.", std::nullopt};
    std::vector<Claim> claims = {{0, "Claim zero text."}, {1, "Claim one text."},
                                 {2, "Claim two text."}};
    std::vector<Query> queries = {{0, "query zero"}, {1, "query one"}, {2, "query two"}};
    FilterOutcome outcome = filter.filter_sample(qa, claims, queries);

    auto calls = transport->calls();
    int batch = 0, single = 0, pair = 0, other = 0;
    for (const auto& call : calls) {
        std::string prompt = user_prompt(call.body);
        int claims_present = 0;
        for (const Claim& c : claims)
            claims_present += prompt.find(c.text) != std::string::npos ? 1 : 0;
        int queries_present = 0;
        for (const Query& q : queries)
            queries_present += prompt.find(q.text) != std::string::npos ? 1 : 0;
        if (prompt.find("intended for Google Search") != std::string::npos) {
            if (claims_present == 1 && queries_present == 1) ++pair;
            else ++other;
        } else if (claims_present == 3) {
            ++batch;
        } else if (claims_present == 1) {
            ++single;
        } else {
            ++other;
        }
    }
    bool ok = outcome.passed && calls.size() == 14 && batch == 2 && single == 3 && pair == 9 &&
              other == 0;
    detail = "captured prompts: " + std::to_string(batch) + " batch (full claim list), " +
             std::to_string(single) + " single-claim, " + std::to_string(pair) +
             " claim-query pair; expected 2/3/9";
    return ok;
}

// ---------------------------------------------------------------------------
// 7. End-to-end replay determinism

bool criterion_replay_determinism(std::string& detail) {
    std::string dir = fresh_dir("determinism");
    write_qa_corpus(dir + "/qa.jsonl", 50);
    Config config = detection_config(dir);

    auto transport = std::make_shared<ScriptedTransport>(detection_backend());
    runner::detect_file(config, "qa.jsonl", "out_record", transport);

    config.cache_mode = CacheMode::replay;
    auto strict = std::make_shared<StrictTransport>();
    runner::detect_file(config, "qa.jsonl", "run1", strict);
    runner::detect_file(config, "qa.jsonl", "run2", strict);

    std::string reports1 = util::read_file(dir + "/run1/reports.jsonl");
    std::string reports2 = util::read_file(dir + "/run2/reports.jsonl");
    std::string summary1 = util::read_file(dir + "/run1/summary.json");
    std::string summary2 = util::read_file(dir + "/run2/summary.json");
    bool ok = strict->hits.load() == 0 && !reports1.empty() && reports1 == reports2 &&
              summary1 == summary2;
    detail = "50-QA corpus, two replay runs: reports " +
             std::string(reports1 == reports2 ? "byte-identical" : "DIFFER") + ", summary " +
             std::string(summary1 == summary2 ? "byte-identical" : "DIFFER") + ", 0 sockets";
    return ok;
}

// ---------------------------------------------------------------------------
// 8. Dataset pipeline

bool criterion_dataset_pipeline(std::string& detail) {
    // Forge + filter against a scripted backend: one third of the QAs fail
    // decontextualization in round 1 and pass after resynthesis.
    auto transport = std::make_shared<ScriptedTransport>(
        [](const std::string&, const json& body) -> HttpResponse {
            std::string prompt = user_prompt(body);
            if (prompt.find("extract all claims") != std::string::npos) {
                auto pos = prompt.find("[Question]\nQuestion ");
                int index = std::stoi(prompt.substr(pos + 20));
                bool first_round_bad = index % 3 == 0;
                // round is detectable by the example block the prompt carries;
                // simpler: mark badness in the claim text only when the prompt
                // asks about this question for the first time.
                static std::map<int, int> synth_count;
                int round = ++synth_count[index];
                int n = index % 4 + 1;
                std::string out;
                for (int c = 0; c < n; ++c) {
                    out += (first_round_bad && round == 1 ? "AMBIG " : "") + std::string("Claim ") +
                           std::to_string(index) + "-" + std::to_string(c) + " states a fact.\n";
                }
                return chat_ok(out);
            }
            if (prompt.find("search engine query") != std::string::npos) {
                auto pos = prompt.rfind("[Claim]\n");
                std::string claim = prompt.substr(pos + 8);
                claim = claim.substr(0, claim.find('\n'));
                return chat_ok("verify " + claim);
            }
            if (prompt.find("Decontextualization:") != std::string::npos) {
                return chat_ok(prompt.find("AMBIG") != std::string::npos ? "No" : "Yes");
            }
            return chat_ok("Yes");
        });
    auto chat = std::make_shared<ChatClient>(
        fast_chat_config(), transport,
        std::make_shared<ReplayCache>());

    FixtureEmbedder embedder;
    std::vector<FewShotExample> pool_examples;
    for (int i = 0; i < 5; ++i) {
        FewShotExample ex;
        ex.qa = QAPair{"pool" + std::to_string(i), Language::en, "PQ?",
                       "pool answer " + std::to_string(i), std::nullopt};
        ex.claims_text = "pool claim " + std::to_string(i);
        ex.answer_length = util::utf8_length(ex.qa.answer);
        pool_examples.push_back(ex);
        embedder.add(ex.qa.answer, {1.0, 0.1 * i});
    }
    ExamplePool pool(pool_examples, &embedder);
    std::vector<QueryShot> query_pool;
    for (int i = 0; i < 4; ++i) {
        query_pool.push_back({Language::en, "qc" + std::to_string(i), "qq" + std::to_string(i)});
    }

    std::vector<QAPair> qas;
    for (int i = 0; i < 25; ++i) {
        QAPair qa{"qa" + std::to_string(i), Language::en, "Question " + std::to_string(i) + "?",
                  "Answer " + std::to_string(i) + ".", std::nullopt};
        embedder.add(qa.answer, {0.6, 0.4});
        qas.push_back(qa);
    }

    SynthesisForge forge(PromptLibrary::builtin(), chat.get(), "synth", SynthesisConfig{});
    CriteriaFilter filter(PromptLibrary::builtin(), chat.get(), "eval");
    SynthesisLoop loop(&forge, &filter, &pool, &query_pool);
    LoopOptions options;
    options.quota = 20;
    options.max_rounds = 3;
    options.seed = 7;
    LoopResult result = loop.run(qas, options);

    bool loop_ok = result.quota_reached && result.rounds_run <= 3 &&
                   static_cast<std::int64_t>(result.accepted.size()) >= 20;

    // Prepare: stratify to exactly 20, split 9:1 -> 18/2, emit, re-parse.
    PromptLibrary library = PromptLibrary::builtin();
    std::vector<TrainingSample> samples;
    for (const RawSample& raw : result.accepted) {
        samples.push_back(make_training_sample(raw, library));
    }
    std::int64_t cap = 5; // 4 claim-count groups, quota 20
    StratifiedPick pick = stratified_sample(samples, 20, cap, 17);
    std::map<int, std::int64_t> capped_counts;
    for (std::int64_t i = 0; i < pick.capped_phase_count; ++i) {
        capped_counts[pick.samples[static_cast<std::size_t>(i)].claim_count]++;
    }
    bool cap_ok = true;
    for (const auto& [group, count] : capped_counts) {
        (void)group;
        cap_ok = cap_ok && count <= cap;
    }

    DatasetSplit split_result = split(pick.samples, {9, 1}, 23);
    bool split_ok = split_result.train.size() == 18 && split_result.validation.size() == 2;

    std::string dir = fresh_dir("dataset");
    emit_training_records(split_result.train, dir + "/train.jsonl");
    emit_training_records(split_result.validation, dir + "/valid.jsonl");
    int roundtrips = 0, expected_records = 0;
    for (const char* file : {"train.jsonl", "valid.jsonl"}) {
        for (const json& row : jsonl::read_file(dir + "/" + std::string(file))) {
            ++expected_records;
            std::string response = row.at("messages").at(1).at("content").get<std::string>();
            ClaimQuerySet parsed = parse_joint_output(response, Language::en);
            if (!parsed.pairs.empty()) ++roundtrips;
        }
    }
    bool roundtrip_ok = roundtrips == expected_records && expected_records == 20;

    detail = "loop reached " + std::to_string(result.accepted.size()) + "/20 in " +
             std::to_string(result.rounds_run) + " rounds; split 18/2: " +
             (split_ok ? "yes" : "no") + "; capped-phase cap respected: " +
             (cap_ok ? "yes" : "no") + "; " + std::to_string(roundtrips) + "/" +
             std::to_string(expected_records) + " records re-parse";
    return loop_ok && cap_ok && split_ok && roundtrip_ok;
}

// ---------------------------------------------------------------------------
// 9. Property suite

bool criterion_property_suite(std::string& detail) {
    std::mt19937_64 rng(555);
    // cosine symmetry and scale invariance at 1e-12
    int cosine_failures = 0;
    for (int iter = 0; iter < 300; ++iter) {
        std::size_t dim = 2 + rng() % 6;
        std::vector<double> u = random_unit_vector(rng, dim);
        std::vector<double> v = random_unit_vector(rng, dim);
        double alpha = 0.001 + static_cast<double>(rng() % 100000) / 1000.0;
        std::vector<double> scaled = u;
        for (double& x : scaled) x *= alpha;
        if (std::abs(cosine_similarity(u, v) - cosine_similarity(v, u)) > 1e-12)
            ++cosine_failures;
        if (std::abs(cosine_similarity(scaled, v) - cosine_similarity(u, v)) > 1e-12)
            ++cosine_failures;
    }

    // parse_verdict totality over 1000 fuzz strings
    int verdict_failures = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        std::size_t len = rng() % 60;
        std::string raw;
        for (std::size_t i = 0; i < len; ++i) raw.push_back(static_cast<char>(rng() % 256));
        try {
            ParsedVerdict a = parse_verdict(raw, Language::en);
            ParsedVerdict b = parse_verdict(raw, Language::en);
            bool one_label = a.label == VerdictLabel::Correct ||
                             a.label == VerdictLabel::Hallucinated ||
                             a.label == VerdictLabel::Unverifiable;
            if (!one_label || a.label != b.label) ++verdict_failures;
        } catch (const std::exception&) {
            ++verdict_failures;
        }
    }

    // alignment scale invariance over criterion-2 instances
    int alignment_failures = 0;
    for (const AlignmentInstance& inst : alignment_instances(97, 100)) {
        AlignmentMap base = align_claims_vectors(inst.sentences, inst.claims, 0.5);
        auto rescale = [&rng](std::vector<std::vector<double>> vs) {
            for (auto& v : vs) {
                double alpha = 0.01 + static_cast<double>(rng() % 100000) / 1000.0;
                for (double& x : v) x *= alpha;
            }
            return vs;
        };
        AlignmentMap rescaled =
            align_claims_vectors(rescale(inst.sentences), rescale(inst.claims), 0.5);
        if (!(base == rescaled)) ++alignment_failures;
    }

    detail = "cosine: " + std::to_string(cosine_failures) + " failures; verdict totality: " +
             std::to_string(verdict_failures) + " failures; alignment rescale: " +
             std::to_string(alignment_failures) + " failures";
    return cosine_failures == 0 && verdict_failures == 0 && alignment_failures == 0;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "parser round-trip", criterion_parser_roundtrip, 1.0},
        {2, "alignment oracle", criterion_alignment_oracle, 5.0},
        {3, "aggregation truth table", criterion_aggregation_truth_table, 0.0},
        {4, "metric fixtures", criterion_metric_fixtures, 0.0},
        {5, "efficiency accounting", criterion_efficiency_accounting, 10.0},
        {6, "protocol dispatch", criterion_protocol_dispatch, 0.0},
        {7, "end-to-end replay determinism", criterion_replay_determinism, 60.0},
        {8, "dataset pipeline", criterion_dataset_pipeline, 0.0},
        {9, "property suite", criterion_property_suite, 0.0},
    };

    int failed = 0;
    for (Criterion& criterion : criteria) {
        std::string detail;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_limit_s > 0 && elapsed > criterion.time_limit_s) {
            ok = false;
            detail += " [exceeded " + std::to_string(criterion.time_limit_s) + "s limit]";
        }
        std::printf("%s criterion %d (%s): %s [%.2fs]\n", ok ? "PASS" : "FAIL", criterion.number,
                    criterion.name.c_str(), detail.c_str(), elapsed);
        if (!ok) ++failed;
    }
    if (failed > 0) {
        std::printf("%d of %zu acceptance criteria FAILED\n", failed, criteria.size());
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}
