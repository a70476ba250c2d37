#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "jointcq/synthesis.hpp"
#include "jointcq/templates.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

// One training record for the joint claim-query generator: prompt is the
// generation prompt for the QA pair, response is the rendered
// claims/queries/end block. response parses back into exactly claim_count
// pairs.
struct TrainingSample {
    Language language = Language::en;
    int claim_count = 0;
    std::string prompt;
    std::string response;
    std::string qa_id;

    bool operator==(const TrainingSample&) const = default;
};

void to_json(json& j, const TrainingSample& v);
void from_json(const json& j, TrainingSample& v);

// Throws InvalidArgumentError when the sample has no claims.
TrainingSample make_training_sample(const RawSample& sample, const PromptLibrary& library);

struct StratifiedPick {
    std::vector<TrainingSample> samples;
    std::vector<bool> topped_up; // aligned with samples; true = quota top-up pick
    std::int64_t capped_phase_count = 0;
};

// Groups by claim_count, draws up to per_group_cap per group (uniform,
// seeded, groups visited in ascending claim count), then fills the remaining
// quota uniformly from the unchosen remainder. Exactly quota results.
// per_group_cap <= 0 selects the default ceil(quota / group count).
StratifiedPick stratified_sample(const std::vector<TrainingSample>& samples, std::int64_t quota,
                                 std::int64_t per_group_cap, std::uint64_t seed);

struct SplitRatio {
    int train = 9;
    int validation = 1;
};

struct DatasetSplit {
    std::vector<TrainingSample> train;
    std::vector<TrainingSample> validation;
};

// Seeded shuffle, then round(n * train/(train+validation)) rows to train and
// the rest to validation. Disjoint and exhaustive.
DatasetSplit split(const std::vector<TrainingSample>& dataset, SplitRatio ratio,
                   std::uint64_t seed);

enum class TrainingRecordFormat { chat_messages, prompt_response };

// JSONL, one object per sample, UTF-8, newline-terminated. chat_messages
// emits {"messages": [user, assistant]}; prompt_response emits
// {"prompt":..., "response":...}.
void emit_training_records(const std::vector<TrainingSample>& samples, const std::string& path,
                           TrainingRecordFormat format = TrainingRecordFormat::chat_messages);

// Realized distribution: counts per (language, claim_count) plus totals.
json dataset_manifest(const DatasetSplit& split_result);

} // namespace jointcq
