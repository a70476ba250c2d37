#include "jointcq/templates.hpp"

#include "jointcq/errors.hpp"
#include "jointcq/util.hpp"

#include <filesystem>

namespace jointcq {

namespace fs = std::filesystem;

namespace {

// --- Joint claim-query generation -----------------------------------------

const char* kCqPromptEn = R"TPL(### Task
Given a question and an answer as input, your task is to extract all claims, and generate a search engine query for each claim to help fact-check the claims.

### Task Rules
When extracting claims, strictly follow these rules:
1. Claims must be factual statements that can be verified or refuted. Exclude subjective opinions, emotional expressions, and vague judgments.
2. Each claim must be semantically complete and independently understandable without relying on context.
3. Avoid ambiguous pronouns in claims. Use specific nouns for clarity.
4. Extract and output all qualifying claims, with each claim on a separate line.
5. If no claims meeting the above criteria exist in the input, output "No claims."

When generating the queries, strictly follow these rules:
1. The queries should be concise and clear, specifically targeting the claims to be verified.
2. The queries should be applicable to search engines and can help users obtain valid information.
3. If there is nothing to query, output "No query".

### Input
[Question]
{question}
[Answer]
{answer})TPL";

const char* kCqPromptZh = R"TPL(### 任务
给定问题和回答作为输入，你的任务是提取所有的陈述，然后为每条陈述生成一条搜索引擎查询，用于协助对陈述进行事实核查。

### 任务规则
提取陈述时请严格遵循以下规则：
1. 陈述必须是可以核实或驳斥的事实性声明。排除主观意见、情绪表达和模糊判断。
2. 每条陈述必须语义完整，不依赖上下文即可独立理解其含义。
3. 陈述中禁止使用指代不明的代词，必须使用具体名词表述。
4. 必须提取并输出所有符合条件的陈述，每条陈述独占一行。
5. 当输入中不存在符合上述标准的陈述时，输出“无陈述”。

生成查询时请严格遵循以下规则：
1. 查询应当简洁明确，对待验证的陈述具有针对性。
2. 查询能够应用于搜索引擎的搜索，帮助用户获取有效信息。
3. 若无待查询的内容，直接输出“无查询”。

### 输入
[问题]
{question}
[回答]
{answer})TPL";

// --- Verification ----------------------------------------------------------

const char* kVerifierEn = R"TPL(### Task
Given a claim and related reference searched by a query as input, your task is to determine whether the claim is valid based on the reference.

### Evaluation Criteria
Please make your judgment based on the following criteria and choose one of the three options:
1. Correct: The reference supports the claim.
2. Hallucination: The reference is relevant to the claim, but does not support the claim.
3. Irrelevant: The reference is irrelevant to the claim, thus does not contain enough information to determine the factuality of the claim. Only use this option when absolutely necessary.

Provide only one option as the output. No additional explanation is allowed.

### Input
[Claim]
{claim}
[Reference]
{reference})TPL";

const char* kVerifierZh = R"TPL(### 任务
给定一条陈述以及由查询检索到相关的参考资料作为输入，你的任务是根据参考资料判断陈述是否成立。

### 判断标准
请依据以下标准进行判断，输出三个选项之一：
1. 正确：参考资料能够支持陈述。
2. 幻觉：参考资料与陈述相关，但并不支持陈述。
3. 无关：参考资料与陈述内容无关，信息不足，无法判断陈述的真实性。非必要不使用此选项。

只输出一个选项，不允许有任何额外解释。

### 输入
[陈述]
{claim}
[参考资料]
{reference})TPL";

// --- Claim synthesis (few-shot) ---------------------------------------------

const char* kClaimSynthesisEn = R"TPL(### Task
Given a pair of question and answer as input, your task is to extract all claims.

### Task Rules
When extracting claims, strictly follow these rules:
1. Claims must be factual statements that can be verified or refuted. Exclude subjective opinions, emotional expressions, and vague judgments.
2. Each claim must be semantically complete and independently understandable without relying on context.
3. Avoid ambiguous pronouns in claims. Use specific nouns for clarity.
4. Extract and output all qualifying claims, with each claim on a separate line.
5. If no claims meeting the above criteria exist in the input, output "No claims."
6. Strictly follow the specified format in the response, without adding extra explanations or unrelated content.

### Examples
{examples}

### Input
[Question]
{question}
[Answer]
{answer}
[Claims])TPL";

const char* kClaimSynthesisZh = R"TPL(### 任务
给定一对问题和回答作为输入，你的任务是提取所有的陈述。

### 任务规则
提取陈述时请严格遵循以下规则：
1. 陈述必须是可以核实或驳斥的事实性声明。排除主观意见、情绪表达和模糊判断。
2. 每条陈述必须语义完整，不依赖上下文即可独立理解其含义。
3. 陈述中禁止使用指代不明的代词，必须使用具体名词表述。
4. 必须提取并输出所有符合条件的陈述，每条陈述独占一行。
5. 当输入中不存在符合上述标准的陈述时，输出“无陈述”。
6. 必须严格按照指定格式回复，不得添加其他内容，不得添加多余的解释说明。

### 示例
{examples}

### 输入
[问题]
{question}
[回答]
{answer}
[陈述])TPL";

// --- Query synthesis (few-shot) ---------------------------------------------

const char* kQuerySynthesisEn = R"TPL(### Task
Given a claim, your task is to generate a search engine query to help fact-check the claim.

### Task Rules
When generating the query, strictly follow these rules:
1. The query should be concise and clear, specifically targeting the claim to be verified.
2. The query should be applicable to search engines and can help users obtain valid information.
3. Always output a query.
4. If there is nothing to query, output "No query".
5. You must strictly follow the specified format. Do not add any extra content or explanations.

### Examples
{examples}

### Input
[Claim]
{claim}
[Query])TPL";

const char* kQuerySynthesisZh = R"TPL(### 任务
给定一条陈述，你的任务是生成一条搜索引擎查询，用于协助对该陈述进行事实核查。

### 任务规则
生成查询时请严格遵循以下规则：
1. 查询应当简洁明确，对待验证的陈述具有针对性。
2. 查询能够应用于搜索引擎的搜索，帮助用户获取有效信息。
3. 始终输出一条查询语句。
4. 若无待查询的内容，直接输出“无查询”。
5. 必须严格按照指定格式回复，不得添加其他内容，不得添加多余的解释说明。

### 示例
{examples}

### 输入
[陈述]
{claim}
[查询])TPL";

// --- Criteria-guided filtering ----------------------------------------------
// One criterion per prompt; the {criterion} slot receives one of the
// criterion_* texts below.

const char* kClaimFilterEn = R"TPL(### Task
You are provided with a question, its answer, a set of claims (a claim) extracted from the QA pair. Your task is to assess whether the claim(s) satisfy the specific criterion.

### Evaluation Criteria
The claim(s) should meet the following criterion:
{criterion}

If the claim(s) meet the criterion, respond with "Yes"; otherwise, respond with "No".

### Input
[Question]
{question}
[Answer]
{answer}
[Claim(s)]
{claims})TPL";

const char* kClaimFilterZh = R"TPL(### 任务
给定一个问题、其答案、一组(条)从问答对中提取的陈述，你的任务是评估这些(条)陈述是否满足特定的标准。

### 评估标准
陈述应当满足以下标准：
{criterion}

如果这些(条)陈述符合标准，请回答“是”；否则，请回答“否”。

### 输入
[问题]
{question}
[回答]
{answer}
[陈述]
{claims})TPL";

const char* kQueryFilterEn = R"TPL(### Task
You are given a claim and a query intended for Google Search. Your task is to evaluate whether the query satisfies the specific criterion.

### Evaluation Criteria
The query is considered helpful if it meets the following criterion:
{criterion}

If the query meets the criterion, respond with "Yes"; otherwise, respond with "No". No additional explanation is allowed.

### Input
[Claim]
{claim}
[Query]
{query})TPL";

const char* kQueryFilterZh = R"TPL(### 任务
给定一条陈述和一条用于Google搜索的查询，你的任务是评估该查询是否满足特定的标准。

### 评估标准
如果查询符合以下标准，则认为它是有帮助的：
{criterion}

如果查询满足以上标准，请回答“是”；否则，请回答“否”。不允许输出任何额外解释。

### 输入
[陈述]
{claim}
[查询]
{query})TPL";

const char* kCriterionEntailmentEn =
    "Entailment: The content of the claims should be fully supported by the source text. "
    "Review each statement point by point to ensure that every statement is fully supported.";
const char* kCriterionCoverageEn =
    "Coverage: The extracted claims should capture all the verifiable factual information in "
    "the source text. Evaluate all claims collectively against the question and answer to "
    "verify full coverage.";
const char* kCriterionDecontextualizationEn =
    "Decontextualization: The claim should be understandable on its own, without requiring "
    "additional context.";
const char* kCriterionRelevanceEn =
    "Relevance: The query directly relates to the claim, addressing its content, implications, "
    "or underlying assumptions.";
const char* kCriterionConcisenessEn =
    "Conciseness: The query should be clear and focused on the core information, avoiding "
    "multiple complex ideas or detailed descriptions in one query.";
const char* kCriterionUsabilityEn =
    "Usability: The query should use natural, fluent, and easily readable language that can "
    "yield relevant and accurate results from Google Search.";

const char* kCriterionEntailmentZh =
    "蕴含性：陈述的内容应完全由原文支持。逐条展开检查陈述，确保每条陈述都能被支持。";
const char* kCriterionCoverageZh =
    "覆盖性：提取出的这组陈述应涵盖原文中所有可验证的事实信息。视所有陈述为一个整体并与问答进行比较以确保覆盖性。";
const char* kCriterionDecontextualizationZh =
    "去上下文化：每条陈述应在不需要额外上下文的情况下可以被理解。";
const char* kCriterionRelevanceZh =
    "相关性：提问需紧扣陈述本身，涉及其内容、含义或背后的假设。";
const char* kCriterionConcisenessZh =
    "简洁性：查询应简明扼要，聚焦核心信息，避免在一个查询中包含多个复杂概念或细节描述。";
const char* kCriterionUsabilityZh =
    "可用性：查询应使用自然、流畅且易读的语言，以便从Google搜索中获得相关且准确的结果。";

SectionMarkers markers_en() {
    return {"[Claims]", "[Queries]", "[End]", "No claims.", "No query"};
}

SectionMarkers markers_zh() {
    return {"[陈述]", "[查询]", "[结束]", "无陈述", "无查询"};
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

} // namespace

void validate(const CQPromptTemplate& tpl) {
    const SectionMarkers& m = tpl.markers;
    std::vector<std::string> marks = {m.claims_header, m.queries_header, m.end_marker,
                                      m.no_claims_literal, m.no_query_literal};
    for (std::size_t i = 0; i < marks.size(); ++i) {
        if (marks[i].empty()) throw InvalidArgumentError("section marker must be non-empty");
        for (std::size_t k = i + 1; k < marks.size(); ++k) {
            if (marks[i] == marks[k]) {
                throw InvalidArgumentError("section markers must be mutually distinct: " + marks[i]);
            }
        }
    }
    if (count_occurrences(tpl.template_text, "{question}") != 1 ||
        count_occurrences(tpl.template_text, "{answer}") != 1) {
        throw InvalidArgumentError("cq template must contain {question} and {answer} exactly once");
    }
}

std::string substitute_slots(std::string text,
                             const std::vector<std::pair<std::string, std::string>>& slots) {
    for (const auto& [name, value] : slots) {
        std::string slot = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = text.find(slot, pos)) != std::string::npos) {
            text.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }
    return text;
}

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    lib.cq_templates_[Language::en] = CQPromptTemplate{Language::en, kCqPromptEn, markers_en()};
    lib.cq_templates_[Language::zh] = CQPromptTemplate{Language::zh, kCqPromptZh, markers_zh()};
    auto put = [&](const std::string& name, const char* en, const char* zh) {
        lib.assets_[name + ".en"] = en;
        lib.assets_[name + ".zh"] = zh;
    };
    put("verifier", kVerifierEn, kVerifierZh);
    put("claim_synthesis", kClaimSynthesisEn, kClaimSynthesisZh);
    put("query_synthesis", kQuerySynthesisEn, kQuerySynthesisZh);
    put("claim_filter", kClaimFilterEn, kClaimFilterZh);
    put("query_filter", kQueryFilterEn, kQueryFilterZh);
    put("criterion_entailment", kCriterionEntailmentEn, kCriterionEntailmentZh);
    put("criterion_coverage", kCriterionCoverageEn, kCriterionCoverageZh);
    put("criterion_decontextualization", kCriterionDecontextualizationEn,
        kCriterionDecontextualizationZh);
    put("criterion_relevance", kCriterionRelevanceEn, kCriterionRelevanceZh);
    put("criterion_conciseness", kCriterionConcisenessEn, kCriterionConcisenessZh);
    put("criterion_usability", kCriterionUsabilityEn, kCriterionUsabilityZh);
    for (const auto& [lang, tpl] : lib.cq_templates_) {
        (void)lang;
        validate(tpl);
    }
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::string& templates_dir) {
    PromptLibrary lib = builtin();
    if (templates_dir.empty()) return lib;
    if (!fs::is_directory(templates_dir)) {
        throw ConfigError("templates dir does not exist: " + templates_dir);
    }
    for (Language lang : {Language::en, Language::zh}) {
        std::string suffix = "." + to_string(lang) + ".txt";
        for (auto& [key, value] : lib.assets_) {
            std::string name = key.substr(0, key.rfind('.'));
            if (key.substr(key.rfind('.') + 1) != to_string(lang)) continue;
            fs::path file = fs::path(templates_dir) / (name + suffix);
            if (fs::exists(file)) value = util::read_file(file.string());
        }
        fs::path cq_file = fs::path(templates_dir) / ("cq_prompt" + suffix);
        if (fs::exists(cq_file)) {
            CQPromptTemplate tpl = lib.cq_templates_.at(lang);
            tpl.template_text = util::read_file(cq_file.string());
            validate(tpl);
            lib.cq_templates_[lang] = tpl;
        }
    }
    return lib;
}

const CQPromptTemplate& PromptLibrary::cq_template(Language lang) const {
    auto it = cq_templates_.find(lang);
    if (it == cq_templates_.end()) {
        throw MissingTemplateError("no cq template registered for language " + to_string(lang));
    }
    return it->second;
}

const std::string& PromptLibrary::text(const std::string& name, Language lang) const {
    auto it = assets_.find(name + "." + to_string(lang));
    if (it == assets_.end()) {
        throw MissingTemplateError("no template asset " + name + " for language " + to_string(lang));
    }
    return it->second;
}

} // namespace jointcq
