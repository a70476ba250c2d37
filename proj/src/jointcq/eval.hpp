#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jointcq/gateway.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

struct SentenceGold {
    std::string text;
    bool gold_hallucinated = false;
};

struct AnnotatedResponse {
    std::string qa_id;
    std::vector<SentenceGold> sentences;
    bool gold_response_hallucinated = false;
};

// Accepts a provided response label, derives it as OR over sentence golds
// when absent, and rejects inconsistent combinations.
void to_json(json& j, const AnnotatedResponse& v);
void from_json(const json& j, AnnotatedResponse& v);

struct AlignmentMap {
    std::map<int, std::vector<int>> assignments; // sentence index -> claim indices
    std::vector<int> unaligned_claims;

    bool operator==(const AlignmentMap&) const = default;
};

void to_json(json& j, const AlignmentMap& v);

// Each claim goes to its argmax-similarity sentence iff that maximum is
// >= threshold; argmax ties break to the lowest sentence index.
AlignmentMap align_claims_vectors(const std::vector<std::vector<double>>& sentence_vectors,
                                  const std::vector<std::vector<double>>& claim_vectors,
                                  double threshold);

// Embedding wrapper; a claim whose embedding fails is left unaligned with a
// warning.
AlignmentMap align_claims(const std::vector<std::string>& sentences,
                          const std::vector<Claim>& claims, Embedder& embedder,
                          double threshold = 0.5,
                          std::vector<std::string>* warnings = nullptr);

// Sentence label: Hallucinated if any aligned claim is, else Correct if any
// aligned claim is, else Unverifiable (no aligned claims count as
// Unverifiable). verdicts are looked up by claim index.
std::vector<VerdictLabel> sentence_labels(const AlignmentMap& alignment,
                                          const std::vector<ClaimVerdict>& verdicts,
                                          std::size_t n_sentences);

// sentence_labels mapped through hallucination_indicator for the mode.
std::vector<std::optional<bool>> sentence_predictions(const AlignmentMap& alignment,
                                                      const std::vector<ClaimVerdict>& verdicts,
                                                      std::size_t n_sentences, ScoringMode mode);

struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
};

enum class EvalLevel { sentence, response };

std::string to_string(EvalLevel level);

struct MetricsSummary {
    EvalLevel level = EvalLevel::sentence;
    ScoringMode mode = ScoringMode::main;
    double accuracy = 0.0;
    double f1_hallucination = 0.0;
    std::int64_t n_evaluated = 0;
    std::int64_t n_unverifiable = 0; // absent predictions dropped from scoring
    Confusion confusion;
    bool empty = false; // nothing left to evaluate
};

void to_json(json& j, const MetricsSummary& v);

// Positive class = hallucinated. Absent predictions are dropped and counted
// as unverifiable. Throws LengthMismatchError when |pred| != |gold|.
MetricsSummary compute_metrics(const std::vector<std::optional<bool>>& pred,
                               const std::vector<bool>& gold, EvalLevel level, ScoringMode mode);

// Fallback splitter for unannotated inputs: terminal punctuation (.!? or
// 。！？) kept with its sentence, no empty segments.
std::vector<std::string> segment_sentences(const std::string& text, Language language);

// matched / total, 0 when total is 0.
double consistency_rate(std::int64_t matched_labels, std::int64_t total);

} // namespace jointcq
