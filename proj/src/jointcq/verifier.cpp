#include "jointcq/verifier.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/searcher.hpp"
#include "jointcq/util.hpp"

namespace jointcq {

ParsedVerdict parse_verdict(const std::string& raw, Language language) {
    (void)language; // literal sets are disjoint, so both are always checked
    if (util::contains_ci(raw, "irrelevant") || raw.find("无关") != std::string::npos) {
        return {VerdictLabel::Unverifiable, true};
    }
    if (util::contains_ci(raw, "hallucination") || raw.find("幻觉") != std::string::npos) {
        return {VerdictLabel::Hallucinated, true};
    }
    if (util::contains_ci(raw, "correct") || raw.find("正确") != std::string::npos) {
        return {VerdictLabel::Correct, true};
    }
    return {VerdictLabel::Unverifiable, false};
}

Verifier::Verifier(PromptLibrary library, const ChatClient* chat, std::string model,
                   bool skip_empty_evidence, double temperature)
    : library_(std::move(library)), chat_(chat), model_(std::move(model)),
      skip_empty_evidence_(skip_empty_evidence), temperature_(temperature) {}

std::string Verifier::build_prompt(const Claim& claim, const std::string& reference,
                                   Language language) const {
    return substitute_slots(library_.text("verifier", language),
                            {{"claim", claim.text}, {"reference", reference}});
}

ClaimVerdict Verifier::verify(const Claim& claim, const EvidenceBundle& evidence,
                              Language language, UsageMeter* meter) const {
    ClaimVerdict verdict;
    verdict.claim = claim;
    verdict.evidence = evidence;

    if (evidence.snippets.empty() && skip_empty_evidence_) {
        // Without evidence the only possible answer is Irrelevant; skip the call.
        verdict.label = VerdictLabel::Unverifiable;
        verdict.note = "empty evidence; verification skipped";
        if (meter) meter->add_judgement();
        return verdict;
    }

    ChatRequest request;
    request.model = model_;
    request.temperature = temperature_;
    request.messages = {{"user", build_prompt(claim, bundle_to_reference_text(evidence), language)}};
    try {
        ChatResponse response = chat_->complete(request, meter);
        verdict.raw_model_output = response.content;
        ParsedVerdict parsed = parse_verdict(response.content, language);
        verdict.label = parsed.label;
        if (!parsed.matched_literal) {
            verdict.note = "no option literal in verifier output";
        }
    } catch (const Error& e) {
        verdict.label = VerdictLabel::Unverifiable;
        verdict.note = std::string("verification failed: ") + e.what();
    }
    if (meter) meter->add_judgement();
    return verdict;
}

} // namespace jointcq
