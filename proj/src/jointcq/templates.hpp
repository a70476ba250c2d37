#pragma once
#include <map>
#include <string>
#include <vector>

#include "jointcq/types.hpp"

namespace jointcq {

// Section markers of the joint generator's response format.
struct SectionMarkers {
    std::string claims_header;
    std::string queries_header;
    std::string end_marker;
    std::string no_claims_literal;
    std::string no_query_literal;
};

struct CQPromptTemplate {
    Language language = Language::en;
    std::string template_text; // {question} and {answer} slots
    SectionMarkers markers;
};

// Throws InvalidArgumentError unless markers are non-empty and mutually
// distinct and the template carries each slot exactly once.
void validate(const CQPromptTemplate& tpl);

// Replaces every {name} occurrence; unknown slots are left untouched.
std::string substitute_slots(std::string text,
                             const std::vector<std::pair<std::string, std::string>>& slots);

// Named prompt assets keyed by language. Built-ins ship with the library;
// a config directory can override any asset via <name>.<lang>.txt files.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    static PromptLibrary with_overrides(const std::string& templates_dir);

    const CQPromptTemplate& cq_template(Language lang) const;
    // Asset names: verifier, claim_synthesis, query_synthesis, claim_filter,
    // query_filter, criterion_{entailment,coverage,decontextualization,
    // relevance,conciseness,usability}.
    const std::string& text(const std::string& name, Language lang) const;

private:
    std::map<std::string, std::string> assets_; // key = name + "." + lang
    std::map<Language, CQPromptTemplate> cq_templates_;
};

} // namespace jointcq
