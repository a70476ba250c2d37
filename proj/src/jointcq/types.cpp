#include "jointcq/types.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

namespace jointcq {

std::string to_string(Language lang) {
    switch (lang) {
    case Language::en: return "en";
    case Language::zh: return "zh";
    }
    throw InvalidArgumentError("unknown language value");
}

Language language_from_string(const std::string& s) {
    if (s == "en") return Language::en;
    if (s == "zh") return Language::zh;
    throw InvalidArgumentError("unsupported language: " + s);
}

std::string derive_qa_id(const std::string& question, const std::string& answer) {
    // 0x1f separator keeps (q="a", a="bc") distinct from (q="ab", a="c").
    std::string h = util::sha256_hex(question + '\x1f' + answer);
    return "qa-" + h.substr(0, 16);
}

void validate(const QAPair& qa) {
    if (util::trim(qa.question).empty()) {
        throw InvalidArgumentError("QAPair.question empty after trim (id=" + qa.id + ")");
    }
    if (util::trim(qa.answer).empty()) {
        throw InvalidArgumentError("QAPair.answer empty after trim (id=" + qa.id + ")");
    }
}

std::string to_string(VerdictLabel label) {
    switch (label) {
    case VerdictLabel::Correct: return "correct";
    case VerdictLabel::Hallucinated: return "hallucinated";
    case VerdictLabel::Unverifiable: return "unverifiable";
    }
    throw InvalidArgumentError("unknown verdict label value");
}

VerdictLabel verdict_label_from_string(const std::string& s) {
    if (s == "correct") return VerdictLabel::Correct;
    if (s == "hallucinated") return VerdictLabel::Hallucinated;
    if (s == "unverifiable") return VerdictLabel::Unverifiable;
    throw InvalidArgumentError("unknown verdict label: " + s);
}

std::string to_string(ScoringMode mode) {
    switch (mode) {
    case ScoringMode::main: return "main";
    case ScoringMode::verifiable_only: return "verifiable_only";
    }
    throw InvalidArgumentError("unknown scoring mode value");
}

ScoringMode scoring_mode_from_string(const std::string& s) {
    if (s == "main") return ScoringMode::main;
    if (s == "verifiable_only" || s == "verifiable-only") return ScoringMode::verifiable_only;
    throw InvalidArgumentError("unknown scoring mode: " + s);
}

std::optional<bool> hallucination_indicator(VerdictLabel label, ScoringMode mode) {
    switch (label) {
    case VerdictLabel::Hallucinated: return true;
    case VerdictLabel::Correct: return false;
    case VerdictLabel::Unverifiable:
        if (mode == ScoringMode::main) return false;
        return std::nullopt;
    }
    throw InvalidArgumentError("unknown verdict label value");
}

void to_json(json& j, const QAPair& v) {
    j = json{{"id", v.id},
             {"language", to_string(v.language)},
             {"question", v.question},
             {"answer", v.answer}};
    if (v.source_model) j["source_model"] = *v.source_model;
}

void from_json(const json& j, QAPair& v) {
    j.at("id").get_to(v.id);
    v.language = language_from_string(j.at("language").get<std::string>());
    j.at("question").get_to(v.question);
    j.at("answer").get_to(v.answer);
    if (j.contains("source_model") && !j.at("source_model").is_null()) {
        v.source_model = j.at("source_model").get<std::string>();
    } else {
        v.source_model.reset();
    }
}

void to_json(json& j, const Claim& v) {
    j = json{{"index", v.index}, {"text", v.text}};
}

void from_json(const json& j, Claim& v) {
    j.at("index").get_to(v.index);
    j.at("text").get_to(v.text);
}

void to_json(json& j, const Query& v) {
    j = json{{"index", v.index}, {"text", v.text}};
}

void from_json(const json& j, Query& v) {
    j.at("index").get_to(v.index);
    j.at("text").get_to(v.text);
}

void to_json(json& j, const ClaimQueryPair& v) {
    j = json{{"claim", v.claim}, {"query", v.query}};
}

void from_json(const json& j, ClaimQueryPair& v) {
    j.at("claim").get_to(v.claim);
    j.at("query").get_to(v.query);
}

void to_json(json& j, const ClaimQuerySet& v) {
    j = json{{"qa_id", v.qa_id}, {"pairs", v.pairs}, {"raw_output", v.raw_output}};
}

void from_json(const json& j, ClaimQuerySet& v) {
    j.at("qa_id").get_to(v.qa_id);
    j.at("pairs").get_to(v.pairs);
    j.at("raw_output").get_to(v.raw_output);
}

void to_json(json& j, const Snippet& v) {
    j = json{{"rank", v.rank}, {"title", v.title}, {"snippet", v.snippet}, {"url", v.url}};
}

void from_json(const json& j, Snippet& v) {
    j.at("rank").get_to(v.rank);
    j.at("title").get_to(v.title);
    j.at("snippet").get_to(v.snippet);
    j.at("url").get_to(v.url);
}

void to_json(json& j, const EvidenceBundle& v) {
    j = json{{"query_text", v.query_text}, {"snippets", v.snippets}};
}

void from_json(const json& j, EvidenceBundle& v) {
    j.at("query_text").get_to(v.query_text);
    j.at("snippets").get_to(v.snippets);
}

void to_json(json& j, const ClaimVerdict& v) {
    j = json{{"claim", v.claim},
             {"label", to_string(v.label)},
             {"raw_model_output", v.raw_model_output},
             {"evidence", v.evidence},
             {"note", v.note}};
}

void from_json(const json& j, ClaimVerdict& v) {
    j.at("claim").get_to(v.claim);
    v.label = verdict_label_from_string(j.at("label").get<std::string>());
    j.at("raw_model_output").get_to(v.raw_model_output);
    j.at("evidence").get_to(v.evidence);
    j.at("note").get_to(v.note);
}

void to_json(json& j, const UsageCounters& v) {
    j = json{{"llm_calls", v.llm_calls},
             {"search_calls", v.search_calls},
             {"judgements", v.judgements}};
}

void from_json(const json& j, UsageCounters& v) {
    j.at("llm_calls").get_to(v.llm_calls);
    j.at("search_calls").get_to(v.search_calls);
    j.at("judgements").get_to(v.judgements);
}

void to_json(json& j, const DetectionReport& v) {
    j = json{{"qa_id", v.qa_id},
             {"verdicts", v.verdicts},
             {"response_label", to_string(v.response_label)},
             {"counters", v.counters},
             {"notes", v.notes}};
}

void from_json(const json& j, DetectionReport& v) {
    j.at("qa_id").get_to(v.qa_id);
    j.at("verdicts").get_to(v.verdicts);
    v.response_label = verdict_label_from_string(j.at("response_label").get<std::string>());
    j.at("counters").get_to(v.counters);
    j.at("notes").get_to(v.notes);
}

} // namespace jointcq
