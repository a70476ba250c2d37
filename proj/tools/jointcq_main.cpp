// jointcq CLI: thin driver over the C API. Resolves layered configuration
// (defaults < config file < env vars < flags) into one JSON document, then
// dispatches to the library. Exit codes: 0 success, 1 partial failure or
// quota shortfall, 2 configuration/usage errors.
#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include "jointcq.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using json = nlohmann::json;

json merge(json base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) return overlay;
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            base[it.key()] = merge(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
    return base;
}

void apply_env(json& config) {
    struct EnvMap {
        const char* var;
        const char* section;
        const char* key;
    };
    // Secrets and endpoints only; everything else comes from file or flags.
    static const EnvMap mappings[] = {
        {"JOINTCQ_CHAT_API_KEY", "chat", "api_key"},
        {"JOINTCQ_CHAT_BASE_URL", "chat", "base_url"},
        {"JOINTCQ_EMBED_API_KEY", "embedding", "api_key"},
        {"JOINTCQ_EMBED_BASE_URL", "embedding", "base_url"},
        {"JOINTCQ_SEARCH_API_KEY", "search", "api_key"},
        {"JOINTCQ_SEARCH_BASE_URL", "search", "base_url"},
    };
    for (const EnvMap& m : mappings) {
        const char* value = std::getenv(m.var);
        if (value != nullptr && value[0] != '\0') {
            config[m.section][m.key] = value;
        }
    }
}

struct CommonFlags {
    std::string config_path;
    std::string workdir;
    std::string cache_mode;
    std::string cache_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (JSON)");
    cmd->add_option("--workdir", flags.workdir, "Base directory for relative paths");
    cmd->add_option("--cache-mode", flags.cache_mode, "live | record | replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    cmd->add_option("--cache-dir", flags.cache_dir, "Replay cache directory");
    cmd->add_option("--seed", flags.seed, "Seed for all seeded operations");
    cmd->add_option("--parallelism", flags.parallelism, "Global fan-out cap");
}

json resolve_config(const CommonFlags& flags, const json& command_overrides) {
    json config = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw CLI::ValidationError("--config", "cannot open " + flags.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        json file_config = json::parse(ss.str(), nullptr, false);
        if (file_config.is_discarded()) {
            throw CLI::ValidationError("--config", "invalid JSON in " + flags.config_path);
        }
        config = merge(config, file_config);
    }
    apply_env(config);
    json flag_overrides = json::object();
    if (!flags.workdir.empty()) flag_overrides["workdir"] = flags.workdir;
    if (!flags.cache_mode.empty()) flag_overrides["cache"]["mode"] = flags.cache_mode;
    if (!flags.cache_dir.empty()) flag_overrides["cache"]["dir"] = flags.cache_dir;
    if (flags.seed) flag_overrides["seed"] = *flags.seed;
    if (flags.parallelism) {
        flag_overrides["parallelism"]["qa"] = *flags.parallelism;
        flag_overrides["parallelism"]["claims"] = *flags.parallelism;
    }
    config = merge(config, flag_overrides);
    config = merge(config, command_overrides);
    return config;
}

class Context {
public:
    explicit Context(const json& config) {
        jointcq_status status = jointcq_context_create(config.dump().c_str(), &ctx_);
        if (status != JOINTCQ_OK) {
            throw std::runtime_error(std::string("config error: ") + jointcq_last_error());
        }
    }
    ~Context() { jointcq_context_free(ctx_); }
    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;

    jointcq_context* get() const { return ctx_; }

private:
    jointcq_context* ctx_ = nullptr;
};

int finish(jointcq_status status, const char* op) {
    switch (status) {
    case JOINTCQ_OK:
        return 0;
    case JOINTCQ_ERR_PARTIAL:
    case JOINTCQ_ERR_QUOTA_NOT_REACHED:
        std::cerr << op << ": " << jointcq_last_error() << "\n";
        return 1;
    case JOINTCQ_ERR_CONFIG:
    case JOINTCQ_ERR_INVALID_ARG:
        std::cerr << op << ": " << jointcq_last_error() << "\n";
        return 2;
    default:
        std::cerr << op << ": " << jointcq_last_error() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jointcq: claim-level hallucination detection and training-data tooling"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    int exit_code = 0;

    // detect
    auto* detect = app.add_subcommand("detect", "Run the detection pipeline over QA JSONL");
    CommonFlags detect_flags;
    std::string detect_input, detect_out;
    add_common_flags(detect, detect_flags);
    detect->add_option("--input", detect_input, "QA JSONL input")->required();
    detect->add_option("--out", detect_out, "Output directory")->required();
    detect->callback([&] {
        json config = resolve_config(detect_flags, json::object());
        Context ctx(config);
        exit_code = finish(jointcq_detect(ctx.get(), detect_input.c_str(), detect_out.c_str()),
                           "detect");
    });

    // synthesize
    auto* synthesize =
        app.add_subcommand("synthesize", "Generate answers, claims and queries for questions");
    CommonFlags synth_flags;
    std::string synth_input, synth_out;
    add_common_flags(synthesize, synth_flags);
    synthesize->add_option("--input", synth_input, "Questions JSONL")->required();
    synthesize->add_option("--out", synth_out, "Raw samples JSONL output path")->required();
    synthesize->callback([&] {
        json config = resolve_config(synth_flags, json::object());
        Context ctx(config);
        exit_code = finish(
            jointcq_synthesize(ctx.get(), synth_input.c_str(), synth_out.c_str()), "synthesize");
    });

    // filter
    auto* filter = app.add_subcommand("filter", "Criteria-guided filtering of raw samples");
    CommonFlags filter_flags;
    std::string filter_input, filter_out;
    std::optional<std::int64_t> filter_quota;
    std::optional<int> filter_rounds;
    add_common_flags(filter, filter_flags);
    filter->add_option("--input", filter_input, "Raw samples JSONL")->required();
    filter->add_option("--out", filter_out, "Output directory")->required();
    filter->add_option("--quota", filter_quota, "Accepted-sample quota (loop until reached)");
    filter->add_option("--max-rounds", filter_rounds, "Maximum synthesis+filter rounds");
    filter->callback([&] {
        json overrides = json::object();
        if (filter_quota) overrides["filter"]["quota"] = *filter_quota;
        if (filter_rounds) overrides["filter"]["max_rounds"] = *filter_rounds;
        json config = resolve_config(filter_flags, overrides);
        Context ctx(config);
        exit_code =
            finish(jointcq_filter(ctx.get(), filter_input.c_str(), filter_out.c_str()), "filter");
    });

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Stratify, split and emit training records");
    CommonFlags prepare_flags;
    std::string prepare_input, prepare_out;
    std::optional<std::int64_t> prepare_quota, prepare_cap;
    add_common_flags(prepare, prepare_flags);
    prepare->add_option("--input", prepare_input, "Accepted samples JSONL")->required();
    prepare->add_option("--out", prepare_out, "Output directory")->required();
    prepare->add_option("--quota", prepare_quota, "Dataset size after stratified sampling");
    prepare->add_option("--per-group-cap", prepare_cap, "Cap per claim-count group");
    prepare->callback([&] {
        json overrides = json::object();
        if (prepare_quota) overrides["prepare"]["quota"] = *prepare_quota;
        if (prepare_cap) overrides["prepare"]["per_group_cap"] = *prepare_cap;
        json config = resolve_config(prepare_flags, overrides);
        Context ctx(config);
        exit_code = finish(
            jointcq_prepare(ctx.get(), prepare_input.c_str(), prepare_out.c_str()), "prepare");
    });

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score reports against gold annotations");
    CommonFlags eval_flags;
    std::string eval_reports, eval_gold, eval_out, eval_level, eval_mode;
    std::optional<double> eval_threshold;
    add_common_flags(evaluate, eval_flags);
    evaluate->add_option("--reports", eval_reports, "Detection reports JSONL")->required();
    evaluate->add_option("--gold", eval_gold, "Gold annotations JSONL")->required();
    evaluate->add_option("--out", eval_out, "Output directory")->required();
    evaluate->add_option("--threshold", eval_threshold, "Alignment similarity threshold");
    evaluate->add_option("--level", eval_level, "sentence | response | both")
        ->check(CLI::IsMember({"sentence", "response", "both"}));
    evaluate->add_option("--mode", eval_mode, "main | verifiable-only | both")
        ->check(CLI::IsMember({"main", "verifiable-only", "verifiable_only", "both"}));
    evaluate->callback([&] {
        json overrides = json::object();
        if (eval_threshold) overrides["evaluate"]["threshold"] = *eval_threshold;
        if (!eval_level.empty()) overrides["evaluate"]["level"] = eval_level;
        if (!eval_mode.empty()) overrides["evaluate"]["mode"] = eval_mode;
        json config = resolve_config(eval_flags, overrides);
        Context ctx(config);
        exit_code = finish(jointcq_evaluate(ctx.get(), eval_reports.c_str(), eval_gold.c_str(),
                                            eval_out.c_str()),
                           "evaluate");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // CLI11 returns 0 for --help; everything else is a usage error.
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
