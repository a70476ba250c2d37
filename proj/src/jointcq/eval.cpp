#include "jointcq/eval.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <algorithm>

namespace jointcq {

void to_json(json& j, const AnnotatedResponse& v) {
    json sentences = json::array();
    for (const SentenceGold& s : v.sentences) {
        sentences.push_back(json{{"text", s.text}, {"gold_hallucinated", s.gold_hallucinated}});
    }
    j = json{{"qa_id", v.qa_id},
             {"sentences", sentences},
             {"gold_response_hallucinated", v.gold_response_hallucinated}};
}

void from_json(const json& j, AnnotatedResponse& v) {
    j.at("qa_id").get_to(v.qa_id);
    v.sentences.clear();
    bool any = false;
    for (const json& s : j.at("sentences")) {
        SentenceGold gold;
        s.at("text").get_to(gold.text);
        s.at("gold_hallucinated").get_to(gold.gold_hallucinated);
        any = any || gold.gold_hallucinated;
        v.sentences.push_back(std::move(gold));
    }
    if (j.contains("gold_response_hallucinated") &&
        !j.at("gold_response_hallucinated").is_null()) {
        j.at("gold_response_hallucinated").get_to(v.gold_response_hallucinated);
        if (!v.sentences.empty() && v.gold_response_hallucinated != any) {
            throw InvalidArgumentError("gold response label inconsistent with sentence golds "
                                       "for qa " + v.qa_id);
        }
    } else {
        v.gold_response_hallucinated = any;
    }
}

void to_json(json& j, const AlignmentMap& v) {
    json assignments = json::object();
    for (const auto& [sentence, claims] : v.assignments) {
        assignments[std::to_string(sentence)] = claims;
    }
    j = json{{"assignments", assignments}, {"unaligned_claims", v.unaligned_claims}};
}

AlignmentMap align_claims_vectors(const std::vector<std::vector<double>>& sentence_vectors,
                                  const std::vector<std::vector<double>>& claim_vectors,
                                  double threshold) {
    AlignmentMap map;
    for (std::size_t c = 0; c < claim_vectors.size(); ++c) {
        int best_sentence = -1;
        double best_sim = 0.0;
        for (std::size_t s = 0; s < sentence_vectors.size(); ++s) {
            double sim = cosine_similarity(sentence_vectors[s], claim_vectors[c]);
            // Strict > keeps the lowest sentence index on ties.
            if (best_sentence < 0 || sim > best_sim) {
                best_sentence = static_cast<int>(s);
                best_sim = sim;
            }
        }
        if (best_sentence >= 0 && best_sim >= threshold) {
            map.assignments[best_sentence].push_back(static_cast<int>(c));
        } else {
            map.unaligned_claims.push_back(static_cast<int>(c));
        }
    }
    return map;
}

AlignmentMap align_claims(const std::vector<std::string>& sentences,
                          const std::vector<Claim>& claims, Embedder& embedder,
                          double threshold, std::vector<std::string>* warnings) {
    std::vector<std::vector<double>> sentence_vectors;
    sentence_vectors.reserve(sentences.size());
    for (const std::string& s : sentences) sentence_vectors.push_back(embedder.embed(s));

    AlignmentMap map;
    for (const Claim& claim : claims) {
        std::vector<double> vec;
        try {
            vec = embedder.embed(claim.text);
        } catch (const Error& e) {
            if (warnings) {
                warnings->push_back("embedding failed for claim " + std::to_string(claim.index) +
                                    ": " + e.what());
            }
            map.unaligned_claims.push_back(claim.index);
            continue;
        }
        int best_sentence = -1;
        double best_sim = 0.0;
        for (std::size_t s = 0; s < sentence_vectors.size(); ++s) {
            double sim = cosine_similarity(sentence_vectors[s], vec);
            if (best_sentence < 0 || sim > best_sim) {
                best_sentence = static_cast<int>(s);
                best_sim = sim;
            }
        }
        if (best_sentence >= 0 && best_sim >= threshold) {
            map.assignments[best_sentence].push_back(claim.index);
        } else {
            map.unaligned_claims.push_back(claim.index);
        }
    }
    return map;
}

std::vector<VerdictLabel> sentence_labels(const AlignmentMap& alignment,
                                          const std::vector<ClaimVerdict>& verdicts,
                                          std::size_t n_sentences) {
    std::map<int, VerdictLabel> by_index;
    for (const ClaimVerdict& v : verdicts) by_index[v.claim.index] = v.label;

    std::vector<VerdictLabel> labels(n_sentences, VerdictLabel::Unverifiable);
    for (const auto& [sentence, claim_indices] : alignment.assignments) {
        if (sentence < 0 || static_cast<std::size_t>(sentence) >= n_sentences) {
            throw InvalidArgumentError("alignment references sentence " +
                                       std::to_string(sentence) + " out of range");
        }
        bool any_hallucinated = false;
        bool any_correct = false;
        for (int c : claim_indices) {
            auto it = by_index.find(c);
            if (it == by_index.end()) continue;
            if (it->second == VerdictLabel::Hallucinated) any_hallucinated = true;
            if (it->second == VerdictLabel::Correct) any_correct = true;
        }
        if (any_hallucinated) {
            labels[static_cast<std::size_t>(sentence)] = VerdictLabel::Hallucinated;
        } else if (any_correct) {
            labels[static_cast<std::size_t>(sentence)] = VerdictLabel::Correct;
        }
    }
    return labels;
}

std::vector<std::optional<bool>> sentence_predictions(const AlignmentMap& alignment,
                                                      const std::vector<ClaimVerdict>& verdicts,
                                                      std::size_t n_sentences, ScoringMode mode) {
    std::vector<std::optional<bool>> preds;
    preds.reserve(n_sentences);
    for (VerdictLabel label : sentence_labels(alignment, verdicts, n_sentences)) {
        preds.push_back(hallucination_indicator(label, mode));
    }
    return preds;
}

std::string to_string(EvalLevel level) {
    switch (level) {
    case EvalLevel::sentence: return "sentence";
    case EvalLevel::response: return "response";
    }
    throw InvalidArgumentError("unknown eval level");
}

void to_json(json& j, const MetricsSummary& v) {
    j = json{{"level", to_string(v.level)},
             {"mode", to_string(v.mode)},
             {"accuracy", v.accuracy},
             {"f1_hallucination", v.f1_hallucination},
             {"n_evaluated", v.n_evaluated},
             {"n_unverifiable", v.n_unverifiable},
             {"confusion", json{{"tp", v.confusion.tp},
                                {"fp", v.confusion.fp},
                                {"tn", v.confusion.tn},
                                {"fn", v.confusion.fn}}},
             {"empty", v.empty}};
}

MetricsSummary compute_metrics(const std::vector<std::optional<bool>>& pred,
                               const std::vector<bool>& gold, EvalLevel level,
                               ScoringMode mode) {
    if (pred.size() != gold.size()) {
        throw LengthMismatchError("pred has " + std::to_string(pred.size()) + " entries, gold " +
                                  std::to_string(gold.size()));
    }
    MetricsSummary m;
    m.level = level;
    m.mode = mode;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!pred[i].has_value()) {
            m.n_unverifiable += 1;
            continue;
        }
        bool p = *pred[i];
        bool g = gold[i];
        if (p && g) m.confusion.tp += 1;
        else if (p && !g) m.confusion.fp += 1;
        else if (!p && !g) m.confusion.tn += 1;
        else m.confusion.fn += 1;
    }
    m.n_evaluated = m.confusion.tp + m.confusion.fp + m.confusion.tn + m.confusion.fn;
    if (m.n_evaluated == 0) {
        m.empty = true;
        return m;
    }
    m.accuracy = static_cast<double>(m.confusion.tp + m.confusion.tn) /
                 static_cast<double>(m.n_evaluated);
    std::int64_t denom = 2 * m.confusion.tp + m.confusion.fp + m.confusion.fn;
    m.f1_hallucination =
        denom > 0 ? 2.0 * static_cast<double>(m.confusion.tp) / static_cast<double>(denom) : 0.0;
    return m;
}

std::vector<std::string> segment_sentences(const std::string& text, Language language) {
    std::vector<std::string> segments;
    std::string current;
    std::size_t i = 0;
    auto flush = [&] {
        std::string trimmed = util::trim(current);
        if (!trimmed.empty()) segments.push_back(std::move(trimmed));
        current.clear();
    };
    while (i < text.size()) {
        if (language == Language::en) {
            char c = text[i];
            current.push_back(c);
            ++i;
            if (c == '.' || c == '!' || c == '?') flush();
        } else {
            // zh delimiters 。！？ are three UTF-8 bytes each.
            if (text.compare(i, 3, "\xE3\x80\x82") == 0 ||
                text.compare(i, 3, "\xEF\xBC\x81") == 0 ||
                text.compare(i, 3, "\xEF\xBC\x9F") == 0) {
                current.append(text, i, 3);
                i += 3;
                flush();
            } else {
                current.push_back(text[i]);
                ++i;
            }
        }
    }
    flush();
    return segments;
}

double consistency_rate(std::int64_t matched_labels, std::int64_t total) {
    if (total <= 0) return 0.0;
    return static_cast<double>(matched_labels) / static_cast<double>(total);
}

} // namespace jointcq
