#include "jointcq/cq_generator.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <cctype>

namespace jointcq {

namespace {

// Strips one trailing sentence terminator so "No claims" matches "No claims."
// and "无陈述。" matches "无陈述".
std::string strip_final_period(std::string s) {
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    } else if (s.size() >= 3 && s.substr(s.size() - 3) == "\xE3\x80\x82") { // 。
        s.resize(s.size() - 3);
    }
    return util::trim(s);
}

// Marker lines match case-insensitively at line start, tolerating whitespace.
// Anything after the marker on the same line is returned as section content.
bool match_marker(const std::string& line, const std::string& marker, std::string* rest) {
    std::string trimmed = util::trim(line);
    if (!util::starts_with_ci(trimmed, marker)) return false;
    if (rest) *rest = util::trim(trimmed.substr(marker.size()));
    return true;
}

} // namespace

bool matches_content_literal(const std::string& line, const std::string& literal) {
    return util::lower_ascii(strip_final_period(util::trim(line))) ==
           util::lower_ascii(strip_final_period(literal));
}

std::string normalize_output_line(const std::string& line) {
    std::string s = util::trim(line);
    if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') {
        return util::trim(s.substr(2));
    }
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= 1 && i <= 3 && i < s.size()) {
        if (s.compare(i, 3, "\xE3\x80\x81") == 0) { // 、 enumerator, no space follows
            return util::trim(s.substr(i + 3));
        }
        if (s[i] == '.' || s[i] == ')') {
            std::size_t j = i + 1;
            if (j < s.size()) {
                bool spaced = s[j] == ' ' || s.compare(j, 3, "\xE3\x80\x80") == 0;
                // "1.Claim" still reads as numbering; "1.5 million" does not.
                bool nondigit = !std::isdigit(static_cast<unsigned char>(s[j]));
                if (spaced || nondigit) return util::trim(s.substr(j));
            }
        }
    }
    return s;
}

std::vector<std::string> section_lines(const std::vector<std::string>& raw_lines) {
    std::vector<std::string> out;
    for (const std::string& line : raw_lines) {
        std::string norm = normalize_output_line(line);
        if (!norm.empty()) out.push_back(std::move(norm));
    }
    return out;
}

ClaimQuerySet parse_joint_output(const std::string& raw, const SectionMarkers& markers) {
    if (raw.empty()) throw InvalidArgumentError("parse_joint_output: empty output");
    std::vector<std::string> lines = util::split_lines(raw);

    // Locate sections. The end marker is optional; the claims header is not.
    // Everything after the end marker is ignored.
    const std::size_t npos = lines.size();
    std::size_t claims_at = npos;
    std::size_t queries_at = npos;
    std::size_t end_at = npos;
    std::string claims_rest;
    std::string queries_rest;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (claims_at == npos) {
            if (match_marker(lines[i], markers.claims_header, &claims_rest)) claims_at = i;
        } else if (queries_at == npos) {
            if (match_marker(lines[i], markers.queries_header, &queries_rest)) {
                queries_at = i;
            } else if (match_marker(lines[i], markers.end_marker, nullptr)) {
                end_at = i;
                break;
            }
        } else if (match_marker(lines[i], markers.end_marker, nullptr)) {
            end_at = i;
            break;
        }
    }
    if (claims_at == npos) {
        throw MalformedOutputError("joint output lacks claims header " + markers.claims_header);
    }

    std::vector<std::string> claims_raw;
    if (!claims_rest.empty()) claims_raw.push_back(claims_rest);
    for (std::size_t i = claims_at + 1; i < std::min(queries_at, end_at); ++i) {
        claims_raw.push_back(lines[i]);
    }
    std::vector<std::string> queries_raw;
    if (queries_at != npos) {
        if (!queries_rest.empty()) queries_raw.push_back(queries_rest);
        for (std::size_t i = queries_at + 1; i < end_at; ++i) {
            queries_raw.push_back(lines[i]);
        }
    }

    std::vector<std::string> claims = section_lines(claims_raw);
    std::vector<std::string> queries = section_lines(queries_raw);

    ClaimQuerySet set;
    set.raw_output = raw;

    bool claims_is_literal =
        claims.size() == 1 && matches_content_literal(claims.front(), markers.no_claims_literal);
    if (claims_is_literal || claims.empty()) {
        bool queries_is_literal =
            queries.size() == 1 && matches_content_literal(queries.front(), markers.no_query_literal);
        if (claims_is_literal || queries_is_literal || queries.empty()) {
            return set; // the no-claims case
        }
        throw CountMismatchError("0 claims but " + std::to_string(queries.size()) + " queries");
    }

    bool queries_is_literal =
        queries.size() == 1 && matches_content_literal(queries.front(), markers.no_query_literal);
    if (claims.size() != queries.size() && !queries_is_literal) {
        throw CountMismatchError(std::to_string(claims.size()) + " claims vs " +
                                 std::to_string(queries.size()) + " queries");
    }

    set.pairs.reserve(claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
        ClaimQueryPair pair;
        pair.claim = Claim{static_cast<int>(i), claims[i]};
        // A "No query" line falls back to the claim text so the claim still
        // gets verified.
        if (queries_is_literal || matches_content_literal(queries[i], markers.no_query_literal)) {
            pair.query = Query{static_cast<int>(i), claims[i]};
        } else {
            pair.query = Query{static_cast<int>(i), queries[i]};
        }
        set.pairs.push_back(std::move(pair));
    }
    return set;
}

ClaimQuerySet parse_joint_output(const std::string& raw, Language language) {
    static const PromptLibrary lib = PromptLibrary::builtin();
    return parse_joint_output(raw, lib.cq_template(language).markers);
}

std::string render_joint_output(const std::vector<ClaimQueryPair>& pairs,
                                const SectionMarkers& markers) {
    std::string out = markers.claims_header + "\n";
    if (pairs.empty()) {
        out += markers.no_claims_literal + "\n";
        out += markers.queries_header + "\n";
        out += markers.no_query_literal + "\n";
    } else {
        for (const auto& pair : pairs) out += pair.claim.text + "\n";
        out += markers.queries_header + "\n";
        for (const auto& pair : pairs) out += pair.query.text + "\n";
    }
    out += markers.end_marker;
    return out;
}

std::string render_joint_output(const std::vector<ClaimQueryPair>& pairs, Language language) {
    static const PromptLibrary lib = PromptLibrary::builtin();
    return render_joint_output(pairs, lib.cq_template(language).markers);
}

CqGenerator::CqGenerator(PromptLibrary library, const ChatClient* chat, std::string model,
                         double temperature)
    : library_(std::move(library)), chat_(chat), model_(std::move(model)),
      temperature_(temperature) {}

std::string CqGenerator::build_prompt(const QAPair& qa) const {
    const CQPromptTemplate& tpl = library_.cq_template(qa.language);
    return substitute_slots(tpl.template_text,
                            {{"question", qa.question}, {"answer", qa.answer}});
}

GenerationOutcome CqGenerator::generate(const QAPair& qa, UsageMeter* meter) const {
    GenerationOutcome outcome;
    outcome.set.qa_id = qa.id;
    const SectionMarkers& markers = library_.cq_template(qa.language).markers;
    ChatRequest request;
    request.model = model_;
    request.temperature = temperature_;
    request.messages = {{"user", build_prompt(qa)}};

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw;
        try {
            raw = chat_->complete(request, meter).content;
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        try {
            ClaimQuerySet set = parse_joint_output(raw, markers);
            set.qa_id = qa.id;
            outcome.set = std::move(set);
            outcome.claimless = outcome.set.pairs.empty();
            return outcome;
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    outcome.failed = true;
    outcome.error = last_error;
    return outcome;
}

} // namespace jointcq
