#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jointcq/gateway.hpp"
#include "jointcq/templates.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

struct QuestionRecord {
    std::string id;
    Language language = Language::en;
    std::string question;
    std::optional<std::string> reference;
};

void to_json(json& j, const QuestionRecord& v);
void from_json(const json& j, QuestionRecord& v);

// In-context example for claim synthesis: a QA pair plus its manually
// written claims output segment.
struct FewShotExample {
    QAPair qa;
    std::string claims_text;
    std::int64_t answer_length = 0; // code points of qa.answer

    bool operator==(const FewShotExample&) const = default;
};

void to_json(json& j, const FewShotExample& v);
void from_json(const json& j, FewShotExample& v);

// In-context example for query synthesis.
struct QueryShot {
    Language language = Language::en;
    std::string claim;
    std::string query;
};

void to_json(json& j, const QueryShot& v);
void from_json(const json& j, QueryShot& v);

struct SynthesisConfig {
    double claim_temperature = 0.9;
    double query_temperature = 0.9;
    double answer_temperature = 0.7;
    int shots = 3;
    std::uint64_t seed = 0;
};

// Candidate pool = top-k by answer-embedding cosine similarity united with
// top-k by smallest answer-length difference (3..6 candidates for k=3), then
// a uniform seeded k-subset. Rank ties break by pool order. Throws
// InsufficientPoolError when fewer than k candidates remain after dropping
// entries that share the target's id.
std::vector<FewShotExample> select_claim_examples(
    const std::vector<FewShotExample>& pool,
    const std::vector<std::vector<double>>& pool_embeddings,
    const std::string& target_id,
    const std::vector<double>& target_embedding,
    std::int64_t target_answer_length,
    int k, std::uint64_t seed);

// Pool with answer embeddings computed once; immutable after construction.
class ExamplePool {
public:
    ExamplePool(std::vector<FewShotExample> examples, Embedder* embedder);

    std::vector<FewShotExample> select(const QAPair& target, int k, std::uint64_t seed) const;

    const std::vector<FewShotExample>& examples() const { return examples_; }

private:
    std::vector<FewShotExample> examples_;
    std::vector<std::vector<double>> embeddings_;
    Embedder* embedder_;
};

// Raw synthesized sample flowing into the criteria filter.
struct RawSample {
    QAPair qa;
    std::vector<Claim> claims;
    std::vector<Query> queries;
};

void to_json(json& j, const RawSample& v);
void from_json(const json& j, RawSample& v);

class SynthesisForge {
public:
    SynthesisForge(PromptLibrary library, const ChatClient* chat, std::string synthesizer_model,
                   SynthesisConfig config);

    // One answer per question, models assigned round-robin per language.
    // The prompt is the bare question. Failed questions are skipped with a
    // warning collected into *warnings.
    std::vector<QAPair> generate_answers(const std::vector<QuestionRecord>& questions,
                                         const std::vector<std::string>& models,
                                         UsageMeter* meter = nullptr,
                                         std::vector<std::string>* warnings = nullptr) const;

    // 3-shot claim extraction at claim_temperature; "No claims." means none.
    std::vector<Claim> synthesize_claims(const QAPair& qa,
                                         const std::vector<FewShotExample>& examples,
                                         UsageMeter* meter = nullptr,
                                         std::vector<std::string>* warnings = nullptr) const;

    // One call per claim with `shots` random examples (reseeded per claim);
    // "No query" or a failure falls back to the claim text.
    std::vector<Query> synthesize_queries(const QAPair& qa, const std::vector<Claim>& claims,
                                          const std::vector<QueryShot>& pool,
                                          std::uint64_t seed, UsageMeter* meter = nullptr,
                                          std::vector<std::string>* warnings = nullptr) const;

    const SynthesisConfig& config() const { return config_; }

private:
    PromptLibrary library_;
    const ChatClient* chat_;
    std::string synthesizer_model_;
    SynthesisConfig config_;
};

} // namespace jointcq
