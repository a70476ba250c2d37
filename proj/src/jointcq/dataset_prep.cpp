#include "jointcq/dataset_prep.hpp"

#include "jointcq/cq_generator.hpp"
#include "jointcq/errors.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jointcq {

void to_json(json& j, const TrainingSample& v) {
    j = json{{"language", to_string(v.language)},
             {"claim_count", v.claim_count},
             {"prompt", v.prompt},
             {"response", v.response},
             {"qa_id", v.qa_id}};
}

void from_json(const json& j, TrainingSample& v) {
    v.language = language_from_string(j.at("language").get<std::string>());
    j.at("claim_count").get_to(v.claim_count);
    j.at("prompt").get_to(v.prompt);
    j.at("response").get_to(v.response);
    j.at("qa_id").get_to(v.qa_id);
}

TrainingSample make_training_sample(const RawSample& sample, const PromptLibrary& library) {
    if (sample.claims.empty()) {
        throw InvalidArgumentError("training sample needs at least one claim (qa " +
                                   sample.qa.id + ")");
    }
    if (sample.claims.size() != sample.queries.size()) {
        throw InvalidArgumentError("training sample claims/queries misaligned (qa " +
                                   sample.qa.id + ")");
    }
    const CQPromptTemplate& tpl = library.cq_template(sample.qa.language);
    std::vector<ClaimQueryPair> pairs;
    pairs.reserve(sample.claims.size());
    for (std::size_t i = 0; i < sample.claims.size(); ++i) {
        pairs.push_back(ClaimQueryPair{sample.claims[i], sample.queries[i]});
    }
    TrainingSample out;
    out.language = sample.qa.language;
    out.claim_count = static_cast<int>(sample.claims.size());
    out.prompt = substitute_slots(tpl.template_text, {{"question", sample.qa.question},
                                                      {"answer", sample.qa.answer}});
    out.response = render_joint_output(pairs, tpl.markers);
    out.qa_id = sample.qa.id;
    return out;
}

StratifiedPick stratified_sample(const std::vector<TrainingSample>& samples, std::int64_t quota,
                                 std::int64_t per_group_cap, std::uint64_t seed) {
    if (quota < 0) throw InvalidArgumentError("quota must be non-negative");
    if (quota > static_cast<std::int64_t>(samples.size())) {
        throw InsufficientSamplesError("quota " + std::to_string(quota) + " exceeds " +
                                       std::to_string(samples.size()) + " samples");
    }

    // Group indices by claim count, ascending.
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        groups[samples[i].claim_count].push_back(i);
    }
    if (per_group_cap <= 0) {
        per_group_cap = groups.empty() ? 1
                                       : (quota + static_cast<std::int64_t>(groups.size()) - 1) /
                                             static_cast<std::int64_t>(groups.size());
        if (per_group_cap < 1) per_group_cap = 1;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;
    std::vector<bool> chosen(samples.size(), false);

    // Capped phase: up to per_group_cap per group.
    for (auto& [count, members] : groups) {
        (void)count;
        if (static_cast<std::int64_t>(picked.size()) >= quota) break;
        std::size_t room = static_cast<std::size_t>(quota) - picked.size();
        std::size_t take =
            std::min<std::size_t>(members.size(), static_cast<std::size_t>(per_group_cap));
        take = std::min(take, room);
        if (take == 0) continue;
        std::vector<std::size_t> draw = util::sample_indices(members.size(), take, rng);
        std::sort(draw.begin(), draw.end());
        for (std::size_t d : draw) {
            picked.push_back(members[d]);
            chosen[members[d]] = true;
        }
        if (static_cast<std::int64_t>(picked.size()) >= quota) break;
    }
    StratifiedPick result;
    result.capped_phase_count = static_cast<std::int64_t>(picked.size());

    // Top-up phase: random selection fills the remaining quota.
    std::int64_t missing = quota - static_cast<std::int64_t>(picked.size());
    std::vector<bool> topup_flag(picked.size(), false);
    if (missing > 0) {
        std::vector<std::size_t> remainder;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!chosen[i]) remainder.push_back(i);
        }
        std::vector<std::size_t> draw =
            util::sample_indices(remainder.size(), static_cast<std::size_t>(missing), rng);
        std::sort(draw.begin(), draw.end());
        for (std::size_t d : draw) {
            picked.push_back(remainder[d]);
            topup_flag.push_back(true);
        }
    }

    result.samples.reserve(picked.size());
    for (std::size_t i : picked) result.samples.push_back(samples[i]);
    result.topped_up = std::move(topup_flag);
    return result;
}

DatasetSplit split(const std::vector<TrainingSample>& dataset, SplitRatio ratio,
                   std::uint64_t seed) {
    if (ratio.train < 0 || ratio.validation < 0 || ratio.train + ratio.validation == 0) {
        throw InvalidArgumentError("invalid split ratio");
    }
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        std::size_t j = i + util::draw_index(rng, order.size() - i);
        std::swap(order[i], order[j]);
    }
    double fraction = static_cast<double>(ratio.train) /
                      static_cast<double>(ratio.train + ratio.validation);
    auto train_size = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(dataset.size())));

    DatasetSplit out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < train_size) {
            out.train.push_back(dataset[order[i]]);
        } else {
            out.validation.push_back(dataset[order[i]]);
        }
    }
    return out;
}

void emit_training_records(const std::vector<TrainingSample>& samples, const std::string& path,
                           TrainingRecordFormat format) {
    std::vector<json> rows;
    rows.reserve(samples.size());
    for (const TrainingSample& s : samples) {
        if (format == TrainingRecordFormat::chat_messages) {
            rows.push_back(json{{"messages",
                                 json::array({json{{"role", "user"}, {"content", s.prompt}},
                                              json{{"role", "assistant"},
                                                   {"content", s.response}}})}});
        } else {
            rows.push_back(json{{"prompt", s.prompt}, {"response", s.response}});
        }
    }
    jsonl::write_file(path, rows);
}

json dataset_manifest(const DatasetSplit& split_result) {
    auto tally = [](const std::vector<TrainingSample>& part) {
        json counts = json::object();
        for (const TrainingSample& s : part) {
            std::string lang = to_string(s.language);
            std::string group = std::to_string(s.claim_count);
            if (!counts.contains(lang)) counts[lang] = json::object();
            counts[lang][group] = counts[lang].value(group, 0) + 1;
        }
        return counts;
    };
    return json{{"train", json{{"total", split_result.train.size()},
                               {"claim_count_groups", tally(split_result.train)}}},
                {"validation", json{{"total", split_result.validation.size()},
                                    {"claim_count_groups", tally(split_result.validation)}}}};
}

} // namespace jointcq
