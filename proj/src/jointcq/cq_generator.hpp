#pragma once
#include <string>
#include <vector>

#include "jointcq/gateway.hpp"
#include "jointcq/templates.hpp"
#include "jointcq/types.hpp"

namespace jointcq {

// Drops a leading list numeral ("1. ", "2) ", "3、") or bullet ("- ", "* ")
// and trims. Numerals above 999 are kept: they are years or quantities, not
// list markers.
std::string normalize_output_line(const std::string& line);

// Non-empty normalized lines of a section body.
std::vector<std::string> section_lines(const std::vector<std::string>& raw_lines);

// True when line equals the literal up to case, surrounding whitespace, and
// one trailing sentence terminator ("No claims" matches "No claims.").
bool matches_content_literal(const std::string& line, const std::string& literal);

// Parses the joint generator's "[Claims] ... [Queries] ... [End]" response.
// qa_id is left empty; callers attach it. Throws MalformedOutputError when
// the claims header is missing and CountMismatchError when claim and query
// counts disagree and neither section is its no-content literal.
ClaimQuerySet parse_joint_output(const std::string& raw, const SectionMarkers& markers);
ClaimQuerySet parse_joint_output(const std::string& raw, Language language);

// Inverse of parse_joint_output for valid sets: emits the response template
// (claims lines, queries lines, end marker). Empty sets render the
// no-claims/no-query literals.
std::string render_joint_output(const std::vector<ClaimQueryPair>& pairs,
                                const SectionMarkers& markers);
std::string render_joint_output(const std::vector<ClaimQueryPair>& pairs, Language language);

struct GenerationOutcome {
    ClaimQuerySet set;
    bool failed = false;    // generation or parsing failed after retry
    bool claimless = false; // generator answered the no-claims literal
    std::string error;
};

class CqGenerator {
public:
    CqGenerator(PromptLibrary library, const ChatClient* chat, std::string model,
                double temperature = 0.0);

    std::string build_prompt(const QAPair& qa) const;

    // One chat call at the configured temperature; one retry with the
    // identical prompt on parse failure, then the QA is marked failed.
    GenerationOutcome generate(const QAPair& qa, UsageMeter* meter = nullptr) const;

    const PromptLibrary& library() const { return library_; }

private:
    PromptLibrary library_;
    const ChatClient* chat_;
    std::string model_;
    double temperature_;
};

} // namespace jointcq
