#include "jointcq/criteria_filter.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <algorithm>
#include <map>

namespace jointcq {

namespace {

const char* criterion_asset(CriterionKind kind) {
    switch (kind) {
    case CriterionKind::Entailment: return "criterion_entailment";
    case CriterionKind::Coverage: return "criterion_coverage";
    case CriterionKind::Decontextualization: return "criterion_decontextualization";
    case CriterionKind::Relevance: return "criterion_relevance";
    case CriterionKind::Conciseness: return "criterion_conciseness";
    case CriterionKind::Usability: return "criterion_usability";
    }
    throw InvalidArgumentError("unknown criterion kind");
}

// Yes/是 -> pass, No/否 -> fail, anything else -> fail with a warning tail.
// The comparison tolerates surrounding whitespace and one trailing
// punctuation mark; everything else is conservative failure.
enum class YesNo { yes, no, other };

YesNo parse_yes_no(const std::string& raw) {
    std::string s = util::trim(raw);
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ',')) s.pop_back();
    if (s.size() >= 3) {
        std::string tail = s.substr(s.size() - 3);
        if (tail == "\xE3\x80\x82" || tail == "\xEF\xBC\x81" || tail == "\xEF\xBC\x8C") {
            s.resize(s.size() - 3); // 。！，
        }
    }
    s = util::lower_ascii(util::trim(s));
    if (s == "yes" || s == "是") return YesNo::yes;
    if (s == "no" || s == "否") return YesNo::no;
    return YesNo::other;
}

std::string claims_block(const std::vector<Claim>& claims) {
    std::string out;
    for (const Claim& c : claims) {
        if (!out.empty()) out += '\n';
        out += c.text;
    }
    return out;
}

} // namespace

CriterionScope scope_of(CriterionKind kind) {
    switch (kind) {
    case CriterionKind::Entailment:
    case CriterionKind::Coverage:
        return CriterionScope::Batch;
    default:
        return CriterionScope::Single;
    }
}

bool is_query_criterion(CriterionKind kind) {
    return kind == CriterionKind::Relevance || kind == CriterionKind::Conciseness ||
           kind == CriterionKind::Usability;
}

std::string to_string(CriterionKind kind) {
    switch (kind) {
    case CriterionKind::Entailment: return "entailment";
    case CriterionKind::Coverage: return "coverage";
    case CriterionKind::Decontextualization: return "decontextualization";
    case CriterionKind::Relevance: return "relevance";
    case CriterionKind::Conciseness: return "conciseness";
    case CriterionKind::Usability: return "usability";
    }
    throw InvalidArgumentError("unknown criterion kind");
}

CriterionKind criterion_kind_from_string(const std::string& s) {
    for (CriterionKind kind : kAllCriteria) {
        if (to_string(kind) == s) return kind;
    }
    throw InvalidArgumentError("unknown criterion kind: " + s);
}

void to_json(json& j, const CriterionResult& v) {
    j = json{{"kind", to_string(v.kind)},
             {"subject_id", v.subject_id},
             {"passed", v.passed},
             {"raw", v.raw}};
}

void from_json(const json& j, CriterionResult& v) {
    v.kind = criterion_kind_from_string(j.at("kind").get<std::string>());
    j.at("subject_id").get_to(v.subject_id);
    j.at("passed").get_to(v.passed);
    j.at("raw").get_to(v.raw);
}

void to_json(json& j, const FilterStats& v) {
    j = json::object();
    for (CriterionKind kind : kAllCriteria) {
        const FilterStats::Entry& e = v.of(kind);
        j[to_string(kind)] = json{{"pass_count", e.pass_count},
                                  {"total", e.total},
                                  {"pass_rate", e.pass_rate}};
    }
}

FilterStats filter_stats(const std::vector<CriterionResult>& results) {
    FilterStats stats;
    for (const CriterionResult& r : results) {
        FilterStats::Entry& e = stats.per_criterion[static_cast<std::size_t>(r.kind)];
        e.total += 1;
        if (r.passed) e.pass_count += 1;
    }
    for (FilterStats::Entry& e : stats.per_criterion) {
        e.pass_rate = e.total > 0
                          ? static_cast<double>(e.pass_count) / static_cast<double>(e.total)
                          : 0.0;
    }
    return stats;
}

CriteriaFilter::CriteriaFilter(PromptLibrary library, const ChatClient* chat,
                               std::string evaluator_model, bool short_circuit,
                               double temperature)
    : library_(std::move(library)), chat_(chat), evaluator_model_(std::move(evaluator_model)),
      short_circuit_(short_circuit), temperature_(temperature) {}

std::string CriteriaFilter::build_prompt(CriterionKind kind, const QAPair& qa,
                                         const std::vector<Claim>& claims, const Claim* claim,
                                         const Query* query) const {
    const std::string& criterion = library_.text(criterion_asset(kind), qa.language);
    if (is_query_criterion(kind)) {
        if (claim == nullptr || query == nullptr) {
            throw InvalidArgumentError("query criterion needs a (claim, query) pair");
        }
        return substitute_slots(library_.text("query_filter", qa.language),
                                {{"criterion", criterion},
                                 {"claim", claim->text},
                                 {"query", query->text}});
    }
    std::string claims_text;
    if (scope_of(kind) == CriterionScope::Batch) {
        if (claims.empty()) throw InvalidArgumentError("batch criterion needs the claim list");
        claims_text = claims_block(claims);
    } else {
        if (claim == nullptr) throw InvalidArgumentError("single claim criterion needs a claim");
        claims_text = claim->text; // presented in isolation
    }
    return substitute_slots(library_.text("claim_filter", qa.language),
                            {{"criterion", criterion},
                             {"question", qa.question},
                             {"answer", qa.answer},
                             {"claims", claims_text}});
}

CriterionResult CriteriaFilter::evaluate(CriterionKind kind, const QAPair& qa,
                                         const std::vector<Claim>& claims, const Claim* claim,
                                         const Query* query, UsageMeter* meter) const {
    CriterionResult result;
    result.kind = kind;
    if (scope_of(kind) == CriterionScope::Batch) {
        result.subject_id = qa.id;
    } else {
        const Claim* subject = claim;
        result.subject_id = qa.id + "#" + std::to_string(subject ? subject->index : -1);
    }

    ChatRequest request;
    request.model = evaluator_model_;
    request.temperature = temperature_;
    request.messages = {{"user", build_prompt(kind, qa, claims, claim, query)}};
    try {
        ChatResponse response = chat_->complete(request, meter);
        result.raw = response.content;
        switch (parse_yes_no(response.content)) {
        case YesNo::yes: result.passed = true; break;
        case YesNo::no: result.passed = false; break;
        case YesNo::other:
            result.passed = false;
            result.raw += " [warning: not a yes/no answer]";
            break;
        }
    } catch (const Error& e) {
        result.passed = false;
        result.raw = std::string("[evaluation failed: ") + e.what() + "]";
    }
    return result;
}

FilterOutcome CriteriaFilter::filter_sample(const QAPair& qa, const std::vector<Claim>& claims,
                                            const std::vector<Query>& queries,
                                            UsageMeter* meter) const {
    if (claims.size() != queries.size()) {
        throw InvalidArgumentError("filter_sample: claims and queries must be index-aligned");
    }
    FilterOutcome outcome;
    bool all_passed = true;

    for (CriterionKind kind : {CriterionKind::Entailment, CriterionKind::Coverage}) {
        CriterionResult r = evaluate(kind, qa, claims, nullptr, nullptr, meter);
        bool ok = r.passed;
        outcome.results.push_back(std::move(r));
        if (!ok) {
            all_passed = false;
            if (short_circuit_) {
                outcome.passed = false;
                return outcome;
            }
        }
    }
    for (const Claim& claim : claims) {
        CriterionResult r =
            evaluate(CriterionKind::Decontextualization, qa, claims, &claim, nullptr, meter);
        all_passed = all_passed && r.passed;
        outcome.results.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < claims.size(); ++i) {
        for (CriterionKind kind : {CriterionKind::Relevance, CriterionKind::Conciseness,
                                   CriterionKind::Usability}) {
            CriterionResult r = evaluate(kind, qa, claims, &claims[i], &queries[i], meter);
            all_passed = all_passed && r.passed;
            outcome.results.push_back(std::move(r));
        }
    }
    outcome.passed = all_passed;
    return outcome;
}

SynthesisLoop::SynthesisLoop(const SynthesisForge* forge, const CriteriaFilter* filter,
                             const ExamplePool* claim_examples,
                             const std::vector<QueryShot>* query_examples)
    : forge_(forge), filter_(filter), claim_examples_(claim_examples),
      query_examples_(query_examples) {}

LoopResult SynthesisLoop::run(const std::vector<QAPair>& qas, const LoopOptions& options,
                              std::vector<RawSample> initial_samples, UsageMeter* meter,
                              std::vector<std::string>* warnings) const {
    if (options.quota < 1) throw InvalidArgumentError("loop quota must be >= 1");
    if (options.max_rounds < 1) throw InvalidArgumentError("loop max_rounds must be >= 1");

    LoopResult result;
    result.quota = options.quota;

    std::map<std::string, QAPair> pending; // keyed by qa id, insertion-stable below
    std::vector<std::string> pending_order;
    for (const QAPair& qa : qas) {
        if (pending.emplace(qa.id, qa).second) pending_order.push_back(qa.id);
    }
    std::map<std::string, RawSample> presynthesized;
    for (RawSample& s : initial_samples) {
        if (pending.find(s.qa.id) == pending.end()) {
            pending.emplace(s.qa.id, s.qa);
            pending_order.push_back(s.qa.id);
        }
        presynthesized.emplace(s.qa.id, std::move(s));
    }

    for (int round = 1; round <= options.max_rounds; ++round) {
        result.rounds_run = round;
        std::vector<std::string> still_pending;
        for (const std::string& qa_id : pending_order) {
            if (static_cast<std::int64_t>(result.accepted.size()) >= options.quota) break;
            const QAPair& qa = pending.at(qa_id);

            RawSample sample;
            auto pre = presynthesized.find(qa_id);
            if (round == 1 && pre != presynthesized.end()) {
                sample = pre->second;
            } else {
                // Fresh resynthesis: example selection is reseeded with the
                // round so prompts differ between rounds even under replay.
                std::uint64_t round_seed = util::mix_seed(
                    util::hash_seed(options.seed, qa_id), static_cast<std::uint64_t>(round));
                sample.qa = qa;
                try {
                    std::vector<FewShotExample> shots =
                        claim_examples_->select(qa, forge_->config().shots, round_seed);
                    sample.claims = forge_->synthesize_claims(qa, shots, meter, warnings);
                    sample.queries = forge_->synthesize_queries(qa, sample.claims,
                                                                *query_examples_, round_seed,
                                                                meter, warnings);
                } catch (const Error& e) {
                    if (warnings) {
                        warnings->push_back("synthesis failed for qa " + qa_id + " in round " +
                                            std::to_string(round) + ": " + e.what());
                    }
                    still_pending.push_back(qa_id);
                    continue;
                }
            }

            if (sample.claims.empty()) {
                if (warnings) {
                    warnings->push_back("no claims synthesized for qa " + qa_id + " in round " +
                                        std::to_string(round));
                }
                still_pending.push_back(qa_id);
                continue;
            }

            FilterOutcome outcome = filter_->filter_sample(qa, sample.claims, sample.queries, meter);
            result.audit.insert(result.audit.end(), outcome.results.begin(),
                                outcome.results.end());
            if (outcome.passed) {
                result.accepted.push_back(std::move(sample));
            } else {
                still_pending.push_back(qa_id);
            }
        }
        pending_order = std::move(still_pending);
        if (static_cast<std::int64_t>(result.accepted.size()) >= options.quota) break;
        if (pending_order.empty()) break;
    }

    result.quota_reached = static_cast<std::int64_t>(result.accepted.size()) >= options.quota;
    return result;
}

} // namespace jointcq
