#pragma once
#include <string>

#include "jointcq/gateway.hpp"
#include "jointcq/templates.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

struct ParsedVerdict {
    VerdictLabel label = VerdictLabel::Unverifiable;
    bool matched_literal = false; // false means the fallback fired
};

// Total and deterministic: case-insensitive containment over the option
// literals of both languages; precedence Irrelevant > Hallucination > Correct
// for multi-literal outputs; no literal at all maps to Unverifiable.
ParsedVerdict parse_verdict(const std::string& raw, Language language);

class Verifier {
public:
    Verifier(PromptLibrary library, const ChatClient* chat, std::string model,
             bool skip_empty_evidence = true, double temperature = 0.0);

    std::string build_prompt(const Claim& claim, const std::string& reference,
                             Language language) const;

    // One chat call per claim (none when evidence is empty and skipping is
    // on). Gateway failures degrade to Unverifiable with a note; judgements
    // always advance by one.
    ClaimVerdict verify(const Claim& claim, const EvidenceBundle& evidence, Language language,
                        UsageMeter* meter = nullptr) const;

private:
    PromptLibrary library_;
    const ChatClient* chat_;
    std::string model_;
    bool skip_empty_evidence_;
    double temperature_;
};

} // namespace jointcq
