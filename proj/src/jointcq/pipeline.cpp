#include "jointcq/pipeline.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

namespace jointcq {

void to_json(json& j, const EfficiencyStats& v) {
    j = json{{"search_per_judgement", v.search_per_judgement},
             {"inference_per_sample", v.inference_per_sample},
             {"n_samples", v.n_samples},
             {"n_judgements", v.n_judgements}};
}

VerdictLabel aggregate_response_label(const std::vector<ClaimVerdict>& verdicts) {
    bool any_correct = false;
    for (const ClaimVerdict& v : verdicts) {
        if (v.label == VerdictLabel::Hallucinated) return VerdictLabel::Hallucinated;
        if (v.label == VerdictLabel::Correct) any_correct = true;
    }
    return any_correct ? VerdictLabel::Correct : VerdictLabel::Unverifiable;
}

EfficiencyStats efficiency_report(const std::vector<DetectionReport>& reports) {
    EfficiencyStats stats;
    stats.n_samples = static_cast<std::int64_t>(reports.size());
    std::int64_t searches = 0, llm = 0;
    for (const DetectionReport& r : reports) {
        searches += r.counters.search_calls;
        llm += r.counters.llm_calls;
        stats.n_judgements += r.counters.judgements;
    }
    if (stats.n_judgements > 0) {
        stats.search_per_judgement =
            static_cast<double>(searches) / static_cast<double>(stats.n_judgements);
    }
    if (stats.n_samples > 0) {
        stats.inference_per_sample =
            static_cast<double>(llm) / static_cast<double>(stats.n_samples);
    }
    return stats;
}

DetectionPipeline::DetectionPipeline(CqGenerator generator, SearchClient searcher,
                                     Verifier verifier, PipelineOptions options)
    : generator_(std::move(generator)), searcher_(std::move(searcher)),
      verifier_(std::move(verifier)), options_(options) {}

DetectionReport DetectionPipeline::detect(const QAPair& qa) const {
    validate(qa);
    UsageMeter meter;
    DetectionReport report;
    report.qa_id = qa.id;

    GenerationOutcome generation = generator_.generate(qa, &meter);
    if (generation.failed) {
        report.response_label = VerdictLabel::Unverifiable;
        report.notes.push_back("generation failed: " + generation.error);
        report.counters = meter.snapshot();
        return report;
    }
    if (generation.claimless) {
        report.response_label = VerdictLabel::Unverifiable;
        report.notes.push_back("no claims extracted");
        report.counters = meter.snapshot();
        return report;
    }

    const auto& pairs = generation.set.pairs;
    std::vector<ClaimVerdict> verdicts(pairs.size());
    std::string locale = searcher_.locale_for_language(qa.language);
    util::parallel_for(pairs.size(), static_cast<std::size_t>(options_.claim_parallelism),
                       [&](std::size_t i) {
        const ClaimQueryPair& pair = pairs[i];
        EvidenceBundle evidence;
        evidence.query_text = pair.query.text;
        try {
            SearchRequest request{pair.query.text, options_.num_results, locale};
            evidence = searcher_.search(request, &meter);
        } catch (const Error& e) {
            // Per-claim isolation: a failed search leaves one Unverifiable
            // verdict and touches nothing else.
            ClaimVerdict verdict;
            verdict.claim = pair.claim;
            verdict.evidence = evidence;
            verdict.label = VerdictLabel::Unverifiable;
            verdict.note = std::string("search failed: ") + e.what();
            meter.add_judgement();
            verdicts[i] = std::move(verdict);
            return;
        }
        verdicts[i] = verifier_.verify(pair.claim, evidence, qa.language, &meter);
    });

    // Completion order never matters: slots are indexed by claim index.
    report.verdicts = std::move(verdicts);
    report.response_label = aggregate_response_label(report.verdicts);
    report.counters = meter.snapshot();
    return report;
}

std::vector<DetectionReport> DetectionPipeline::detect_all(const std::vector<QAPair>& qas) const {
    std::vector<DetectionReport> reports(qas.size());
    util::parallel_for(qas.size(), static_cast<std::size_t>(options_.qa_parallelism),
                       [&](std::size_t i) { reports[i] = detect(qas[i]); });
    return reports;
}

} // namespace jointcq
