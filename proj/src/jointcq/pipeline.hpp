#pragma once
#include <cstdint>
#include <vector>

#include "jointcq/cq_generator.hpp"
#include "jointcq/searcher.hpp"
#include "jointcq/types.hpp"
#include "jointcq/verifier.hpp"

namespace jointcq {

struct EfficiencyStats {
    double search_per_judgement = 0.0;
    double inference_per_sample = 0.0;
    std::int64_t n_samples = 0;
    std::int64_t n_judgements = 0;
};

void to_json(json& j, const EfficiencyStats& v);

// Any Hallucinated wins; otherwise any Correct; otherwise Unverifiable
// (including the empty list).
VerdictLabel aggregate_response_label(const std::vector<ClaimVerdict>& verdicts);

EfficiencyStats efficiency_report(const std::vector<DetectionReport>& reports);

struct PipelineOptions {
    int claim_parallelism = 4; // concurrent claims within one QA
    int qa_parallelism = 8;    // concurrent QAs in detect_all
    int num_results = 10;
};

// generate -> search -> verify -> aggregate for one QA pair. Stage failures
// degrade per-claim to Unverifiable; only a generation failure after retry
// fails the whole sample.
class DetectionPipeline {
public:
    DetectionPipeline(CqGenerator generator, SearchClient searcher, Verifier verifier,
                      PipelineOptions options = {});

    DetectionReport detect(const QAPair& qa) const;
    std::vector<DetectionReport> detect_all(const std::vector<QAPair>& qas) const;

private:
    CqGenerator generator_;
    SearchClient searcher_;
    Verifier verifier_;
    PipelineOptions options_;
};

} // namespace jointcq
