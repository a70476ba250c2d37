#include "jointcq/runner.hpp"

#include "jointcq/criteria_filter.hpp"
#include "jointcq/dataset_prep.hpp"
#include "jointcq/errors.hpp"
#include "jointcq/eval.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/util.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace jointcq::runner {

namespace fs = std::filesystem;

namespace {

struct Clients {
    std::shared_ptr<HttpTransport> transport;
    std::shared_ptr<const ReplayCache> cache;
    std::shared_ptr<ChatClient> chat;
    std::shared_ptr<SearchClient> search;
    std::shared_ptr<Embedder> embedder;
    PromptLibrary library = PromptLibrary::builtin();
};

Clients make_clients(const Config& config, std::shared_ptr<HttpTransport> transport_override,
                     bool need_embedder) {
    Clients c;
    c.transport = transport_override ? std::move(transport_override)
                                     : make_httplib_transport(config.chat.timeout_seconds);
    if (config.cache_mode == CacheMode::live) {
        c.cache = std::make_shared<ReplayCache>();
    } else {
        c.cache = std::make_shared<ReplayCache>(config.resolve_path(config.cache_dir),
                                                config.cache_mode);
    }
    c.chat = std::make_shared<ChatClient>(config.chat, c.transport, c.cache);
    c.search = std::make_shared<SearchClient>(config.search, c.transport, c.cache);
    if (need_embedder) {
        if (config.embedding_provider == "fixture") {
            if (config.embedding_fixture_path.empty()) {
                throw ConfigError("embedding.fixture_path required for the fixture provider");
            }
            c.embedder = std::make_shared<FixtureEmbedder>(
                config.resolve_path(config.embedding_fixture_path));
        } else {
            c.embedder = std::make_shared<HttpEmbedder>(config.embedding, c.transport, c.cache);
        }
    }
    if (!config.templates_dir.empty()) {
        c.library = PromptLibrary::with_overrides(config.resolve_path(config.templates_dir));
    }
    return c;
}

std::vector<QAPair> load_qa_file(const std::string& path) {
    std::vector<QAPair> qas;
    for (const json& row : jsonl::read_file(path)) {
        QAPair qa;
        qa.language = language_from_string(row.at("language").get<std::string>());
        row.at("question").get_to(qa.question);
        row.at("answer").get_to(qa.answer);
        if (row.contains("id") && !row.at("id").is_null() &&
            !row.at("id").get<std::string>().empty()) {
            qa.id = row.at("id").get<std::string>();
        } else {
            qa.id = derive_qa_id(qa.question, qa.answer);
        }
        if (row.contains("source_model") && !row.at("source_model").is_null()) {
            qa.source_model = row.at("source_model").get<std::string>();
        }
        validate(qa);
        qas.push_back(std::move(qa));
    }
    return qas;
}

bool report_has_failure(const DetectionReport& report) {
    for (const std::string& note : report.notes) {
        if (note.rfind("generation failed", 0) == 0) return true;
    }
    for (const ClaimVerdict& v : report.verdicts) {
        if (v.note.rfind("search failed", 0) == 0) return true;
        if (v.note.rfind("verification failed", 0) == 0) return true;
    }
    return false;
}

void write_warnings(const std::string& out_dir, const std::vector<std::string>& warnings) {
    if (warnings.empty()) return;
    std::string text;
    for (const std::string& w : warnings) text += w + "\n";
    util::atomic_write_file((fs::path(out_dir) / "warnings.log").string(), text);
}

std::vector<FewShotExample> load_claim_examples(const std::string& path) {
    std::vector<FewShotExample> out;
    for (const json& row : jsonl::read_file(path)) {
        out.push_back(row.get<FewShotExample>());
    }
    return out;
}

std::vector<QueryShot> load_query_examples(const std::string& path) {
    std::vector<QueryShot> out;
    for (const json& row : jsonl::read_file(path)) {
        out.push_back(row.get<QueryShot>());
    }
    return out;
}

} // namespace

DetectSummary detect_file(const Config& config, const std::string& input_jsonl,
                          const std::string& out_dir,
                          std::shared_ptr<HttpTransport> transport_override) {
    Clients clients = make_clients(config, std::move(transport_override), false);
    std::vector<QAPair> qas = load_qa_file(config.resolve_path(input_jsonl));

    CqGenerator generator(clients.library, clients.chat.get(), config.generator_model, 0.0);
    Verifier verifier(clients.library, clients.chat.get(), config.verifier_model,
                      config.skip_empty_evidence, 0.0);
    PipelineOptions options;
    options.claim_parallelism = config.claim_parallelism;
    options.qa_parallelism = config.qa_parallelism;
    options.num_results = config.num_results;
    DetectionPipeline pipeline(std::move(generator), *clients.search, std::move(verifier),
                               options);

    std::vector<DetectionReport> reports = pipeline.detect_all(qas);

    std::string resolved_out = config.resolve_path(out_dir);
    std::vector<json> report_rows;
    json labels = json::array();
    DetectSummary summary;
    summary.n_samples = static_cast<std::int64_t>(reports.size());
    for (const DetectionReport& report : reports) {
        json row;
        to_json(row, report);
        report_rows.push_back(std::move(row));
        labels.push_back(json{{"qa_id", report.qa_id},
                              {"response_label", to_string(report.response_label)}});
        if (report_has_failure(report)) summary.n_failed += 1;
    }
    summary.efficiency = efficiency_report(reports);

    jsonl::write_file((fs::path(resolved_out) / "reports.jsonl").string(), report_rows);
    json efficiency_json;
    to_json(efficiency_json, summary.efficiency);
    json summary_json{{"manifest", run_manifest(config)},
                      {"efficiency", efficiency_json},
                      {"response_labels", labels},
                      {"n_failed", summary.n_failed}};
    util::atomic_write_file((fs::path(resolved_out) / "summary.json").string(),
                            summary_json.dump(2) + "\n");
    return summary;
}

SynthesizeSummary synthesize_file(const Config& config, const std::string& questions_jsonl,
                                  const std::string& output_jsonl,
                                  std::shared_ptr<HttpTransport> transport_override) {
    if (config.answer_models.empty()) {
        throw ConfigError("models.answer_models required for synthesize");
    }
    if (config.claim_examples_path.empty() || config.query_examples_path.empty()) {
        throw ConfigError("filter.claim_examples and filter.query_examples paths required");
    }
    Clients clients = make_clients(config, std::move(transport_override), true);

    std::vector<QuestionRecord> questions;
    for (const json& row : jsonl::read_file(config.resolve_path(questions_jsonl))) {
        questions.push_back(row.get<QuestionRecord>());
    }

    SynthesisForge forge(clients.library, clients.chat.get(), config.synthesizer_model,
                         config.synthesis);
    ExamplePool pool(load_claim_examples(config.resolve_path(config.claim_examples_path)),
                     clients.embedder.get());
    std::vector<QueryShot> query_pool =
        load_query_examples(config.resolve_path(config.query_examples_path));

    std::vector<std::string> warnings;
    UsageMeter meter;
    std::vector<QAPair> qas =
        forge.generate_answers(questions, config.answer_models, &meter, &warnings);

    std::vector<json> rows;
    for (const QAPair& qa : qas) {
        // Seeded like round 1 of the synthesis loop so a later filter run
        // with resynthesis continues the same seed sequence.
        std::uint64_t round_seed =
            util::mix_seed(util::hash_seed(config.seed, qa.id), 1);
        RawSample sample;
        sample.qa = qa;
        try {
            std::vector<FewShotExample> shots =
                pool.select(qa, config.synthesis.shots, round_seed);
            sample.claims = forge.synthesize_claims(qa, shots, &meter, &warnings);
            sample.queries = forge.synthesize_queries(qa, sample.claims, query_pool, round_seed,
                                                      &meter, &warnings);
        } catch (const Error& e) {
            warnings.push_back("synthesis failed for qa " + qa.id + ": " + e.what());
            continue;
        }
        json row;
        to_json(row, sample);
        rows.push_back(std::move(row));
    }

    std::string out_path = config.resolve_path(output_jsonl);
    jsonl::write_file(out_path, rows);
    write_warnings(fs::path(out_path).parent_path().string(), warnings);
    return SynthesizeSummary{static_cast<std::int64_t>(questions.size()),
                             static_cast<std::int64_t>(rows.size()),
                             static_cast<std::int64_t>(warnings.size())};
}

FilterSummary filter_file(const Config& config, const std::string& raw_jsonl,
                          const std::string& out_dir,
                          std::shared_ptr<HttpTransport> transport_override) {
    bool needs_resynthesis = config.filter_quota > 0 && config.filter_max_rounds > 1;
    if (needs_resynthesis &&
        (config.claim_examples_path.empty() || config.query_examples_path.empty())) {
        throw ConfigError("filter with max_rounds > 1 needs example pools for resynthesis");
    }
    Clients clients = make_clients(config, std::move(transport_override), needs_resynthesis);

    std::vector<RawSample> samples;
    for (const json& row : jsonl::read_file(config.resolve_path(raw_jsonl))) {
        samples.push_back(row.get<RawSample>());
    }

    CriteriaFilter filter(clients.library, clients.chat.get(), config.evaluator_model,
                          config.filter_short_circuit, 0.0);

    FilterSummary summary;
    summary.n_input = static_cast<std::int64_t>(samples.size());
    std::vector<RawSample> accepted;
    std::vector<CriterionResult> audit;
    std::vector<std::string> warnings;
    UsageMeter meter;

    if (config.filter_quota > 0) {
        SynthesisForge forge(clients.library, clients.chat.get(), config.synthesizer_model,
                             config.synthesis);
        std::unique_ptr<ExamplePool> pool;
        std::vector<QueryShot> query_pool;
        if (needs_resynthesis) {
            pool = std::make_unique<ExamplePool>(
                load_claim_examples(config.resolve_path(config.claim_examples_path)),
                clients.embedder.get());
            query_pool = load_query_examples(config.resolve_path(config.query_examples_path));
        }
        SynthesisLoop loop(&forge, &filter, pool.get(), &query_pool);
        LoopOptions options;
        options.quota = config.filter_quota;
        options.max_rounds = config.filter_max_rounds;
        options.seed = config.seed;
        LoopResult result = loop.run({}, options, std::move(samples), &meter, &warnings);
        accepted = std::move(result.accepted);
        audit = std::move(result.audit);
        summary.rounds_run = result.rounds_run;
        summary.quota_reached = result.quota_reached;
    } else {
        // Single pass over the provided samples, no loop.
        summary.rounds_run = 1;
        for (const RawSample& sample : samples) {
            if (sample.claims.empty()) {
                warnings.push_back("skipping claimless sample " + sample.qa.id);
                continue;
            }
            FilterOutcome outcome =
                filter.filter_sample(sample.qa, sample.claims, sample.queries, &meter);
            audit.insert(audit.end(), outcome.results.begin(), outcome.results.end());
            if (outcome.passed) accepted.push_back(sample);
        }
    }
    summary.n_accepted = static_cast<std::int64_t>(accepted.size());

    std::string resolved_out = config.resolve_path(out_dir);
    std::vector<json> accepted_rows;
    for (const RawSample& sample : accepted) {
        json row;
        to_json(row, sample);
        accepted_rows.push_back(std::move(row));
    }
    jsonl::write_file((fs::path(resolved_out) / "accepted.jsonl").string(), accepted_rows);

    std::vector<json> audit_rows;
    for (const CriterionResult& r : audit) {
        json row;
        to_json(row, r);
        audit_rows.push_back(std::move(row));
    }
    jsonl::write_file((fs::path(resolved_out) / "audit.jsonl").string(), audit_rows);

    json stats_json;
    to_json(stats_json, filter_stats(audit));
    json stats_wrapper{{"manifest", run_manifest(config)},
                       {"per_criterion", stats_json},
                       {"n_input", summary.n_input},
                       {"n_accepted", summary.n_accepted},
                       {"rounds_run", summary.rounds_run},
                       {"quota", config.filter_quota},
                       {"quota_reached", summary.quota_reached}};
    util::atomic_write_file((fs::path(resolved_out) / "filter_stats.json").string(),
                            stats_wrapper.dump(2) + "\n");
    write_warnings(resolved_out, warnings);
    return summary;
}

PrepareSummary prepare_file(const Config& config, const std::string& accepted_jsonl,
                            const std::string& out_dir) {
    PromptLibrary library = config.templates_dir.empty()
                                ? PromptLibrary::builtin()
                                : PromptLibrary::with_overrides(
                                      config.resolve_path(config.templates_dir));

    std::vector<TrainingSample> pool;
    for (const json& row : jsonl::read_file(config.resolve_path(accepted_jsonl))) {
        pool.push_back(make_training_sample(row.get<RawSample>(), library));
    }

    std::int64_t quota = config.prepare_quota > 0
                             ? config.prepare_quota
                             : static_cast<std::int64_t>(pool.size());
    StratifiedPick pick = stratified_sample(pool, quota, config.per_group_cap, config.seed);
    DatasetSplit split_result =
        split(pick.samples, SplitRatio{config.split_train, config.split_validation},
              util::hash_seed(config.seed, "split"));

    TrainingRecordFormat format = config.record_format == "prompt_response"
                                      ? TrainingRecordFormat::prompt_response
                                      : TrainingRecordFormat::chat_messages;
    std::string resolved_out = config.resolve_path(out_dir);
    emit_training_records(split_result.train, (fs::path(resolved_out) / "train.jsonl").string(),
                          format);
    emit_training_records(split_result.validation,
                          (fs::path(resolved_out) / "valid.jsonl").string(), format);

    json manifest = dataset_manifest(split_result);
    manifest["manifest"] = run_manifest(config);
    manifest["capped_phase_count"] = pick.capped_phase_count;
    std::int64_t topups = 0;
    for (bool flag : pick.topped_up) topups += flag ? 1 : 0;
    manifest["topped_up_count"] = topups;
    util::atomic_write_file((fs::path(resolved_out) / "manifest.json").string(),
                            manifest.dump(2) + "\n");
    return PrepareSummary{static_cast<std::int64_t>(split_result.train.size()),
                          static_cast<std::int64_t>(split_result.validation.size())};
}

EvaluateSummary evaluate_file(const Config& config, const std::string& reports_jsonl,
                              const std::string& gold_jsonl, const std::string& out_dir,
                              std::shared_ptr<HttpTransport> transport_override) {
    Clients clients = make_clients(config, std::move(transport_override), true);

    std::map<std::string, DetectionReport> reports;
    for (const json& row : jsonl::read_file(config.resolve_path(reports_jsonl))) {
        DetectionReport report = row.get<DetectionReport>();
        reports[report.qa_id] = std::move(report);
    }
    std::vector<AnnotatedResponse> golds;
    for (const json& row : jsonl::read_file(config.resolve_path(gold_jsonl))) {
        golds.push_back(row.get<AnnotatedResponse>());
    }

    EvaluateSummary summary;
    summary.n_gold = static_cast<std::int64_t>(golds.size());

    std::vector<std::optional<bool>> sentence_pred_main, sentence_pred_verifiable;
    std::vector<bool> sentence_gold;
    std::vector<std::optional<bool>> response_pred_main, response_pred_verifiable;
    std::vector<bool> response_gold;
    std::vector<json> alignment_rows;
    std::vector<std::string> warnings;

    for (const AnnotatedResponse& gold : golds) {
        auto it = reports.find(gold.qa_id);
        std::vector<ClaimVerdict> verdicts;
        VerdictLabel response_label = VerdictLabel::Unverifiable;
        if (it != reports.end()) {
            verdicts = it->second.verdicts;
            response_label = it->second.response_label;
        } else {
            // A missing report is a failed sample: everything Unverifiable.
            summary.n_missing_reports += 1;
            warnings.push_back("no report for qa " + gold.qa_id);
        }

        std::vector<std::string> sentences;
        for (const SentenceGold& s : gold.sentences) sentences.push_back(s.text);
        std::vector<Claim> claims;
        for (const ClaimVerdict& v : verdicts) claims.push_back(v.claim);

        AlignmentMap alignment;
        if (!claims.empty()) {
            alignment = align_claims(sentences, claims, *clients.embedder,
                                     config.alignment_threshold, &warnings);
        } else {
            // No claims: every sentence is unaligned.
        }
        json alignment_json;
        to_json(alignment_json, alignment);
        alignment_rows.push_back(json{{"qa_id", gold.qa_id}, {"alignment", alignment_json}});

        auto preds_main =
            sentence_predictions(alignment, verdicts, sentences.size(), ScoringMode::main);
        auto preds_verifiable = sentence_predictions(alignment, verdicts, sentences.size(),
                                                     ScoringMode::verifiable_only);
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            sentence_pred_main.push_back(preds_main[i]);
            sentence_pred_verifiable.push_back(preds_verifiable[i]);
            sentence_gold.push_back(gold.sentences[i].gold_hallucinated);
        }

        response_pred_main.push_back(hallucination_indicator(response_label, ScoringMode::main));
        response_pred_verifiable.push_back(
            hallucination_indicator(response_label, ScoringMode::verifiable_only));
        response_gold.push_back(gold.gold_response_hallucinated);
    }

    json metrics;
    auto level_on = [&](const char* level) {
        return config.eval_level == "both" || config.eval_level == level;
    };
    auto mode_on = [&](const char* mode) {
        return config.eval_mode == "both" || config.eval_mode == mode;
    };
    auto put = [&](const char* level_key, const char* mode_key, const MetricsSummary& m) {
        json mj;
        to_json(mj, m);
        metrics[level_key][mode_key] = mj;
    };
    if (level_on("sentence") && mode_on("main")) {
        put("sentence", "main",
            compute_metrics(sentence_pred_main, sentence_gold, EvalLevel::sentence,
                            ScoringMode::main));
    }
    if (level_on("sentence") && mode_on("verifiable_only")) {
        put("sentence", "verifiable_only",
            compute_metrics(sentence_pred_verifiable, sentence_gold, EvalLevel::sentence,
                            ScoringMode::verifiable_only));
    }
    if (level_on("response") && mode_on("main")) {
        put("response", "main",
            compute_metrics(response_pred_main, response_gold, EvalLevel::response,
                            ScoringMode::main));
    }
    if (level_on("response") && mode_on("verifiable_only")) {
        put("response", "verifiable_only",
            compute_metrics(response_pred_verifiable, response_gold, EvalLevel::response,
                            ScoringMode::verifiable_only));
    }
    metrics["manifest"] = run_manifest(config);

    std::string resolved_out = config.resolve_path(out_dir);
    util::atomic_write_file((fs::path(resolved_out) / "metrics.json").string(),
                            metrics.dump(2) + "\n");
    jsonl::write_file((fs::path(resolved_out) / "alignments.jsonl").string(), alignment_rows);
    write_warnings(resolved_out, warnings);
    return summary;
}

} // namespace jointcq::runner
