#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jointcq/gateway.hpp"
#include "jointcq/synthesis.hpp"
#include "jointcq/templates.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

// Three claim criteria and three query criteria. Entailment and Coverage are
// judged over the full claim set of one QA pair (batch); the rest are judged
// one claim or one claim-query pair at a time (single).
enum class CriterionKind {
    Entailment,
    Coverage,
    Decontextualization,
    Relevance,
    Conciseness,
    Usability,
};

constexpr std::array<CriterionKind, 6> kAllCriteria = {
    CriterionKind::Entailment,       CriterionKind::Coverage,
    CriterionKind::Decontextualization, CriterionKind::Relevance,
    CriterionKind::Conciseness,      CriterionKind::Usability,
};

enum class CriterionScope { Batch, Single };

CriterionScope scope_of(CriterionKind kind);
bool is_query_criterion(CriterionKind kind);
std::string to_string(CriterionKind kind);
CriterionKind criterion_kind_from_string(const std::string& s);

struct CriterionResult {
    CriterionKind kind = CriterionKind::Entailment;
    std::string subject_id; // qa_id for batch, qa_id#claim_index for single
    bool passed = false;
    std::string raw;
};

void to_json(json& j, const CriterionResult& v);
void from_json(const json& j, CriterionResult& v);

struct FilterStats {
    struct Entry {
        std::int64_t pass_count = 0;
        std::int64_t total = 0;
        double pass_rate = 0.0; // pass_count / total, 0 when total == 0
    };
    std::array<Entry, 6> per_criterion; // indexed by CriterionKind order

    const Entry& of(CriterionKind kind) const {
        return per_criterion[static_cast<std::size_t>(kind)];
    }
};

void to_json(json& j, const FilterStats& v);

FilterStats filter_stats(const std::vector<CriterionResult>& results);

struct FilterOutcome {
    bool passed = false;
    std::vector<CriterionResult> results;
};

class CriteriaFilter {
public:
    CriteriaFilter(PromptLibrary library, const ChatClient* chat, std::string evaluator_model,
                   bool short_circuit = true, double temperature = 0.0);

    // Builds exactly one prompt for one criterion. Batch kinds take the full
    // claim list; Decontextualization takes `claim`; query kinds take
    // (claim, query). Yes/是 passes, anything else fails (conservative).
    CriterionResult evaluate(CriterionKind kind, const QAPair& qa,
                             const std::vector<Claim>& claims, const Claim* claim,
                             const Query* query, UsageMeter* meter = nullptr) const;

    // Order: Entailment, Coverage, Decontextualization per claim, then
    // Relevance/Conciseness/Usability per pair. A failed batch criterion
    // short-circuits the rest when short_circuit is on.
    FilterOutcome filter_sample(const QAPair& qa, const std::vector<Claim>& claims,
                                const std::vector<Query>& queries,
                                UsageMeter* meter = nullptr) const;

    std::string build_prompt(CriterionKind kind, const QAPair& qa,
                             const std::vector<Claim>& claims, const Claim* claim,
                             const Query* query) const;

private:
    PromptLibrary library_;
    const ChatClient* chat_;
    std::string evaluator_model_;
    bool short_circuit_;
    double temperature_;
};

struct LoopOptions {
    std::int64_t quota = 0;
    int max_rounds = 1;
    std::uint64_t seed = 0;
};

struct LoopResult {
    std::vector<RawSample> accepted;
    std::vector<CriterionResult> audit; // every criterion evaluation, in order
    int rounds_run = 0;
    bool quota_reached = false;
    std::int64_t quota = 0;
};

// Iterates synthesis + filtering until the quota of accepted samples is
// reached or max_rounds is exhausted. Round 1 may consume pre-synthesized
// samples; later rounds resynthesize claims and queries for the QAs still
// outstanding, with per-round example reselection so prompts (and replay
// cache keys) differ across rounds.
class SynthesisLoop {
public:
    SynthesisLoop(const SynthesisForge* forge, const CriteriaFilter* filter,
                  const ExamplePool* claim_examples, const std::vector<QueryShot>* query_examples);

    LoopResult run(const std::vector<QAPair>& qas, const LoopOptions& options,
                   std::vector<RawSample> initial_samples = {}, UsageMeter* meter = nullptr,
                   std::vector<std::string>* warnings = nullptr) const;

private:
    const SynthesisForge* forge_;
    const CriteriaFilter* filter_;
    const ExamplePool* claim_examples_;
    const std::vector<QueryShot>* query_examples_;
};

} // namespace jointcq
