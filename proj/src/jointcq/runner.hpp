#pragma once
#include <memory>
#include <string>

#include "jointcq/config.hpp"
#include "jointcq/pipeline.hpp"

namespace jointcq::runner {

// File-to-file operations behind the CLI and the C API. All relative paths
// resolve against config.workdir; outputs are written atomically. A non-null
// transport_override replaces the HTTP transport (tests use scripted ones).

struct DetectSummary {
    std::int64_t n_samples = 0;
    std::int64_t n_failed = 0; // samples with a failed stage
    EfficiencyStats efficiency;
};

// Reads QA JSONL, writes reports.jsonl + summary.json into out_dir.
DetectSummary detect_file(const Config& config, const std::string& input_jsonl,
                          const std::string& out_dir,
                          std::shared_ptr<HttpTransport> transport_override = nullptr);

struct SynthesizeSummary {
    std::int64_t n_questions = 0;
    std::int64_t n_samples = 0;
    std::int64_t n_warnings = 0;
};

// questions JSONL -> raw samples JSONL (answers + claims + queries).
SynthesizeSummary synthesize_file(const Config& config, const std::string& questions_jsonl,
                                  const std::string& output_jsonl,
                                  std::shared_ptr<HttpTransport> transport_override = nullptr);

struct FilterSummary {
    std::int64_t n_input = 0;
    std::int64_t n_accepted = 0;
    int rounds_run = 0;
    bool quota_reached = true;
};

// Raw samples JSONL -> accepted.jsonl + audit.jsonl + filter_stats.json.
// filter.quota > 0 runs the iterate-until-quota loop with resynthesis.
FilterSummary filter_file(const Config& config, const std::string& raw_jsonl,
                          const std::string& out_dir,
                          std::shared_ptr<HttpTransport> transport_override = nullptr);

struct PrepareSummary {
    std::int64_t n_train = 0;
    std::int64_t n_validation = 0;
};

// Accepted samples JSONL -> train.jsonl + valid.jsonl + manifest.json.
PrepareSummary prepare_file(const Config& config, const std::string& accepted_jsonl,
                            const std::string& out_dir);

struct EvaluateSummary {
    std::int64_t n_gold = 0;
    std::int64_t n_missing_reports = 0;
};

// Reports + gold JSONL -> metrics.json + alignments.jsonl.
EvaluateSummary evaluate_file(const Config& config, const std::string& reports_jsonl,
                              const std::string& gold_jsonl, const std::string& out_dir,
                              std::shared_ptr<HttpTransport> transport_override = nullptr);

} // namespace jointcq::runner
