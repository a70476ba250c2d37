#include "jointcq/synthesis.hpp"

#include "jointcq/cq_generator.hpp"
#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace jointcq {

namespace {

struct InputHeaders {
    const char* question;
    const char* answer;
    const char* claims;
    const char* claim;
    const char* query;
};

InputHeaders headers_for(Language language) {
    if (language == Language::zh) {
        return {"[问题]", "[回答]", "[陈述]", "[陈述]", "[查询]"};
    }
    return {"[Question]", "[Answer]", "[Claims]", "[Claim]", "[Query]"};
}

std::string format_claim_examples(const std::vector<FewShotExample>& examples,
                                  Language language) {
    InputHeaders h = headers_for(language);
    std::string out;
    for (const FewShotExample& ex : examples) {
        if (!out.empty()) out += "\n\n";
        out += std::string(h.question) + "\n" + ex.qa.question + "\n" + h.answer + "\n" +
               ex.qa.answer + "\n" + h.claims + "\n" + ex.claims_text;
    }
    return out;
}

std::string format_query_examples(const std::vector<QueryShot>& examples, Language language) {
    InputHeaders h = headers_for(language);
    std::string out;
    for (const QueryShot& ex : examples) {
        if (!out.empty()) out += "\n\n";
        out += std::string(h.claim) + "\n" + ex.claim + "\n" + h.query + "\n" + ex.query;
    }
    return out;
}

void warn(std::vector<std::string>* warnings, std::string message) {
    if (warnings) warnings->push_back(std::move(message));
}

} // namespace

void to_json(json& j, const QuestionRecord& v) {
    j = json{{"id", v.id}, {"language", to_string(v.language)}, {"question", v.question}};
    if (v.reference) j["reference"] = *v.reference;
}

void from_json(const json& j, QuestionRecord& v) {
    j.at("id").get_to(v.id);
    v.language = language_from_string(j.at("language").get<std::string>());
    j.at("question").get_to(v.question);
    if (j.contains("reference") && !j.at("reference").is_null()) {
        v.reference = j.at("reference").get<std::string>();
    } else {
        v.reference.reset();
    }
}

void to_json(json& j, const FewShotExample& v) {
    j = json{{"qa", v.qa}, {"claims_text", v.claims_text}, {"answer_length", v.answer_length}};
}

void from_json(const json& j, FewShotExample& v) {
    j.at("qa").get_to(v.qa);
    j.at("claims_text").get_to(v.claims_text);
    // answer_length is derived; recompute when absent, validate when present.
    std::int64_t actual = util::utf8_length(v.qa.answer);
    if (j.contains("answer_length")) {
        j.at("answer_length").get_to(v.answer_length);
        if (v.answer_length != actual) {
            throw InvalidArgumentError("few-shot example answer_length mismatch for qa " +
                                       v.qa.id);
        }
    } else {
        v.answer_length = actual;
    }
    if (util::trim(v.claims_text).empty()) {
        throw InvalidArgumentError("few-shot example claims_text empty for qa " + v.qa.id);
    }
}

void to_json(json& j, const QueryShot& v) {
    j = json{{"language", to_string(v.language)}, {"claim", v.claim}, {"query", v.query}};
}

void from_json(const json& j, QueryShot& v) {
    v.language = language_from_string(j.at("language").get<std::string>());
    j.at("claim").get_to(v.claim);
    j.at("query").get_to(v.query);
}

void to_json(json& j, const RawSample& v) {
    j = json{{"qa", v.qa}, {"claims", v.claims}, {"queries", v.queries}};
}

void from_json(const json& j, RawSample& v) {
    j.at("qa").get_to(v.qa);
    j.at("claims").get_to(v.claims);
    j.at("queries").get_to(v.queries);
}

std::vector<FewShotExample> select_claim_examples(
    const std::vector<FewShotExample>& pool,
    const std::vector<std::vector<double>>& pool_embeddings,
    const std::string& target_id,
    const std::vector<double>& target_embedding,
    std::int64_t target_answer_length,
    int k, std::uint64_t seed) {
    if (pool.size() != pool_embeddings.size()) {
        throw InvalidArgumentError("pool and embeddings size mismatch");
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].qa.id != target_id) usable.push_back(i);
    }
    if (static_cast<int>(usable.size()) < k) {
        throw InsufficientPoolError("example pool has " + std::to_string(usable.size()) +
                                    " usable entries, need " + std::to_string(k));
    }

    // Rank by similarity (desc) and by |answer length delta| (asc); stable
    // sort keeps pool order on ties.
    std::vector<std::size_t> by_sim = usable;
    std::vector<double> sims(pool.size(), 0.0);
    for (std::size_t i : usable) {
        sims[i] = cosine_similarity(target_embedding, pool_embeddings[i]);
    }
    std::stable_sort(by_sim.begin(), by_sim.end(),
                     [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });

    std::vector<std::size_t> by_len = usable;
    auto delta = [&](std::size_t i) {
        return std::llabs(pool[i].answer_length - target_answer_length);
    };
    std::stable_sort(by_len.begin(), by_len.end(),
                     [&](std::size_t a, std::size_t b) { return delta(a) < delta(b); });

    // Union of the two top-k lists, deduplicated, in pool order.
    std::vector<bool> in_candidates(pool.size(), false);
    for (int i = 0; i < k; ++i) in_candidates[by_sim[static_cast<std::size_t>(i)]] = true;
    for (int i = 0; i < k; ++i) in_candidates[by_len[static_cast<std::size_t>(i)]] = true;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (in_candidates[i]) candidates.push_back(i);
    }

    std::vector<FewShotExample> picked;
    if (static_cast<int>(candidates.size()) == k) {
        for (std::size_t i : candidates) picked.push_back(pool[i]);
        return picked;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen =
        util::sample_indices(candidates.size(), static_cast<std::size_t>(k), rng);
    std::sort(chosen.begin(), chosen.end()); // present examples in pool order
    for (std::size_t c : chosen) picked.push_back(pool[candidates[c]]);
    return picked;
}

ExamplePool::ExamplePool(std::vector<FewShotExample> examples, Embedder* embedder)
    : examples_(std::move(examples)), embedder_(embedder) {
    embeddings_.reserve(examples_.size());
    for (const FewShotExample& ex : examples_) {
        embeddings_.push_back(embedder_->embed(ex.qa.answer));
    }
}

std::vector<FewShotExample> ExamplePool::select(const QAPair& target, int k,
                                                std::uint64_t seed) const {
    // Few-shot examples must match the prompt language.
    std::vector<FewShotExample> pool;
    std::vector<std::vector<double>> embeddings;
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        if (examples_[i].qa.language == target.language) {
            pool.push_back(examples_[i]);
            embeddings.push_back(embeddings_[i]);
        }
    }
    return select_claim_examples(pool, embeddings, target.id, embedder_->embed(target.answer),
                                 util::utf8_length(target.answer), k, seed);
}

SynthesisForge::SynthesisForge(PromptLibrary library, const ChatClient* chat,
                               std::string synthesizer_model, SynthesisConfig config)
    : library_(std::move(library)), chat_(chat), synthesizer_model_(std::move(synthesizer_model)),
      config_(config) {}

std::vector<QAPair> SynthesisForge::generate_answers(const std::vector<QuestionRecord>& questions,
                                                     const std::vector<std::string>& models,
                                                     UsageMeter* meter,
                                                     std::vector<std::string>* warnings) const {
    if (models.empty()) throw InvalidArgumentError("generate_answers needs at least one model");
    std::vector<QAPair> out;
    std::map<Language, std::size_t> round_robin;
    for (const QuestionRecord& q : questions) {
        const std::string& model = models[round_robin[q.language]++ % models.size()];
        ChatRequest request;
        request.model = model;
        request.temperature = config_.answer_temperature;
        request.messages = {{"user", q.question}}; // bare question, no instructions
        try {
            ChatResponse response = chat_->complete(request, meter);
            QAPair qa;
            qa.id = q.id.empty() ? derive_qa_id(q.question, response.content) : q.id;
            qa.language = q.language;
            qa.question = q.question;
            qa.answer = response.content;
            qa.source_model = model;
            validate(qa);
            out.push_back(std::move(qa));
        } catch (const Error& e) {
            warn(warnings, "answer generation failed for question " + q.id + ": " + e.what());
        }
    }
    return out;
}

std::vector<Claim> SynthesisForge::synthesize_claims(const QAPair& qa,
                                                     const std::vector<FewShotExample>& examples,
                                                     UsageMeter* meter,
                                                     std::vector<std::string>* warnings) const {
    if (examples.empty()) throw InvalidArgumentError("synthesize_claims needs examples");
    const SectionMarkers& markers = library_.cq_template(qa.language).markers;
    std::string prompt = substitute_slots(
        library_.text("claim_synthesis", qa.language),
        {{"examples", format_claim_examples(examples, qa.language)},
         {"question", qa.question},
         {"answer", qa.answer}});
    ChatRequest request;
    request.model = synthesizer_model_;
    request.temperature = config_.claim_temperature;
    request.messages = {{"user", prompt}};
    ChatResponse response = chat_->complete(request, meter);

    std::vector<std::string> lines;
    for (const std::string& line : util::split_lines(response.content)) {
        std::string trimmed = util::trim(line);
        // Tolerate an echoed header or end marker around the claim lines.
        if (util::starts_with_ci(trimmed, markers.claims_header)) continue;
        if (util::starts_with_ci(trimmed, markers.end_marker)) break;
        lines.push_back(line);
    }
    std::vector<std::string> texts = section_lines(lines);
    std::vector<Claim> claims;
    if (texts.size() == 1 && matches_content_literal(texts.front(), markers.no_claims_literal)) {
        return claims;
    }
    if (texts.empty()) {
        warn(warnings, "claim synthesis returned no usable lines for qa " + qa.id);
        return claims;
    }
    claims.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        claims.push_back(Claim{static_cast<int>(i), texts[i]});
    }
    return claims;
}

std::vector<Query> SynthesisForge::synthesize_queries(const QAPair& qa,
                                                      const std::vector<Claim>& claims,
                                                      const std::vector<QueryShot>& pool,
                                                      std::uint64_t seed, UsageMeter* meter,
                                                      std::vector<std::string>* warnings) const {
    const SectionMarkers& markers = library_.cq_template(qa.language).markers;
    std::vector<QueryShot> language_pool;
    for (const QueryShot& shot : pool) {
        if (shot.language == qa.language) language_pool.push_back(shot);
    }
    if (static_cast<int>(language_pool.size()) < config_.shots) {
        throw InsufficientPoolError("query example pool has " +
                                    std::to_string(language_pool.size()) + " entries, need " +
                                    std::to_string(config_.shots));
    }

    std::vector<Query> queries;
    queries.reserve(claims.size());
    for (const Claim& claim : claims) {
        // Fresh random shots per claim, deterministic in (seed, claim index).
        std::mt19937_64 rng(util::mix_seed(seed, static_cast<std::uint64_t>(claim.index)));
        std::vector<std::size_t> idx = util::sample_indices(
            language_pool.size(), static_cast<std::size_t>(config_.shots), rng);
        std::vector<QueryShot> shots;
        for (std::size_t i : idx) shots.push_back(language_pool[i]);

        std::string prompt = substitute_slots(
            library_.text("query_synthesis", qa.language),
            {{"examples", format_query_examples(shots, qa.language)}, {"claim", claim.text}});
        ChatRequest request;
        request.model = synthesizer_model_;
        request.temperature = config_.query_temperature;
        request.messages = {{"user", prompt}};

        std::string query_text;
        try {
            ChatResponse response = chat_->complete(request, meter);
            for (const std::string& line : util::split_lines(response.content)) {
                std::string norm = normalize_output_line(line);
                if (norm.empty()) continue;
                if (util::starts_with_ci(norm, headers_for(qa.language).query)) continue;
                query_text = norm;
                break;
            }
        } catch (const Error& e) {
            warn(warnings, "query synthesis failed for claim " + std::to_string(claim.index) +
                               " of qa " + qa.id + ": " + e.what());
        }
        bool is_no_query =
            !query_text.empty() && matches_content_literal(query_text, markers.no_query_literal);
        if (query_text.empty() || is_no_query) {
            if (query_text.empty()) {
                warn(warnings, "empty query output for claim " + std::to_string(claim.index) +
                                   " of qa " + qa.id + "; falling back to claim text");
            }
            query_text = claim.text;
        }
        queries.push_back(Query{claim.index, query_text});
    }
    return queries;
}

} // namespace jointcq
