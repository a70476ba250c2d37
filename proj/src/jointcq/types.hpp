#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace jointcq {

using json = nlohmann::json;

enum class Language { en, zh };

std::string to_string(Language lang);
Language language_from_string(const std::string& s);

// One question/answer unit; flows through both detection and synthesis.
struct QAPair {
    std::string id;
    Language language = Language::en;
    std::string question;
    std::string answer;
    std::optional<std::string> source_model;

    bool operator==(const QAPair&) const = default;
};

// Stable content-derived id so replay caches survive re-runs of the same input.
std::string derive_qa_id(const std::string& question, const std::string& answer);

// Throws InvalidArgumentError when question/answer are empty after trimming.
void validate(const QAPair& qa);

struct Claim {
    int index = 0;
    std::string text;

    bool operator==(const Claim&) const = default;
};

struct Query {
    int index = 0;
    std::string text;

    bool operator==(const Query&) const = default;
};

struct ClaimQueryPair {
    Claim claim;
    Query query;

    bool operator==(const ClaimQueryPair&) const = default;
};

// Index-aligned claims and queries from one joint generation. May be empty
// (the no-claims case). raw_output keeps the model text verbatim.
struct ClaimQuerySet {
    std::string qa_id;
    std::vector<ClaimQueryPair> pairs;
    std::string raw_output;

    bool operator==(const ClaimQuerySet&) const = default;
};

struct Snippet {
    int rank = 0; // 1-based
    std::string title;
    std::string snippet;
    std::string url;

    bool operator==(const Snippet&) const = default;
};

// Ranked search snippets for one query; ranks are 1..k contiguous, k <= 10.
// Empty means the search returned nothing.
struct EvidenceBundle {
    std::string query_text;
    std::vector<Snippet> snippets;

    bool operator==(const EvidenceBundle&) const = default;
};

enum class VerdictLabel { Correct, Hallucinated, Unverifiable };

std::string to_string(VerdictLabel label);
VerdictLabel verdict_label_from_string(const std::string& s);

enum class ScoringMode { main, verifiable_only };

std::string to_string(ScoringMode mode);
ScoringMode scoring_mode_from_string(const std::string& s);

// Maps a label to the boolean hallucination indicator. In main mode
// Unverifiable scores as "no hallucination"; in verifiable_only mode it is
// excluded from scoring (absent).
std::optional<bool> hallucination_indicator(VerdictLabel label, ScoringMode mode);

struct ClaimVerdict {
    Claim claim;
    VerdictLabel label = VerdictLabel::Unverifiable;
    std::string raw_model_output;
    EvidenceBundle evidence;
    std::string note; // non-empty for failed or fallback paths

    bool operator==(const ClaimVerdict&) const = default;
};

struct UsageCounters {
    std::int64_t llm_calls = 0;
    std::int64_t search_calls = 0;
    std::int64_t judgements = 0; // one judgement = one claim-level label decision

    bool operator==(const UsageCounters&) const = default;
};

struct DetectionReport {
    std::string qa_id;
    std::vector<ClaimVerdict> verdicts; // ordered by claim index
    VerdictLabel response_label = VerdictLabel::Unverifiable;
    UsageCounters counters;
    std::vector<std::string> notes;

    bool operator==(const DetectionReport&) const = default;
};

// Canonical JSON: lowercase snake_case fields, keys sorted (nlohmann object
// order), optionals omitted when absent. dump() of these is byte-stable.
void to_json(json& j, const QAPair& v);
void from_json(const json& j, QAPair& v);
void to_json(json& j, const Claim& v);
void from_json(const json& j, Claim& v);
void to_json(json& j, const Query& v);
void from_json(const json& j, Query& v);
void to_json(json& j, const ClaimQueryPair& v);
void from_json(const json& j, ClaimQueryPair& v);
void to_json(json& j, const ClaimQuerySet& v);
void from_json(const json& j, ClaimQuerySet& v);
void to_json(json& j, const Snippet& v);
void from_json(const json& j, Snippet& v);
void to_json(json& j, const EvidenceBundle& v);
void from_json(const json& j, EvidenceBundle& v);
void to_json(json& j, const ClaimVerdict& v);
void from_json(const json& j, ClaimVerdict& v);
void to_json(json& j, const UsageCounters& v);
void from_json(const json& j, UsageCounters& v);
void to_json(json& j, const DetectionReport& v);
void from_json(const json& j, DetectionReport& v);

} // namespace jointcq
