#include "jointcq.h"

#include "jointcq/config.hpp"
#include "jointcq/errors.hpp"
#include "jointcq/jsonl.hpp"
#include "jointcq/runner.hpp"
#include "jointcq/verifier.hpp"

#include <memory>
#include <string>
#include <vector>

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

jointcq_status status_for(const std::exception& e) {
    using namespace jointcq;
    if (dynamic_cast<const ConfigError*>(&e)) return JOINTCQ_ERR_CONFIG;
    if (dynamic_cast<const IoError*>(&e)) return JOINTCQ_ERR_IO;
    if (dynamic_cast<const ReplayMissError*>(&e)) return JOINTCQ_ERR_REPLAY_MISS;
    if (dynamic_cast<const TransportError*>(&e)) return JOINTCQ_ERR_TRANSPORT;
    if (dynamic_cast<const EndpointError*>(&e)) return JOINTCQ_ERR_TRANSPORT;
    if (dynamic_cast<const MalformedOutputError*>(&e)) return JOINTCQ_ERR_PARSE;
    if (dynamic_cast<const CountMismatchError*>(&e)) return JOINTCQ_ERR_PARSE;
    if (dynamic_cast<const QuotaNotReachedError*>(&e)) return JOINTCQ_ERR_QUOTA_NOT_REACHED;
    if (dynamic_cast<const InvalidArgumentError*>(&e)) return JOINTCQ_ERR_INVALID_ARG;
    if (dynamic_cast<const Error*>(&e)) return JOINTCQ_ERR_INTERNAL;
    return JOINTCQ_ERR_INTERNAL;
}

template <typename Fn>
jointcq_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_for(e);
    } catch (...) {
        set_error("unknown error");
        return JOINTCQ_ERR_INTERNAL;
    }
}

} // namespace

struct jointcq_context {
    jointcq::Config config;
};

extern "C" {

const char* jointcq_version(void) { return jointcq::kJointcqVersion; }

const char* jointcq_last_error(void) { return g_last_error.c_str(); }

jointcq_status jointcq_context_create(const char* config_json, jointcq_context** out_ctx) {
    if (config_json == nullptr || out_ctx == nullptr) {
        set_error("config_json and out_ctx must be non-null");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    *out_ctx = nullptr;
    return guarded([&] {
        jointcq::json j = jointcq::jsonl::parse_json(config_json, "config");
        auto ctx = std::make_unique<jointcq_context>();
        ctx->config = jointcq::Config::from_json(j);
        *out_ctx = ctx.release();
        return JOINTCQ_OK;
    });
}

void jointcq_context_free(jointcq_context* ctx) { delete ctx; }

jointcq_status jointcq_detect(jointcq_context* ctx, const char* input_jsonl,
                              const char* output_dir) {
    if (ctx == nullptr || input_jsonl == nullptr || output_dir == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        auto summary = jointcq::runner::detect_file(ctx->config, input_jsonl, output_dir);
        if (summary.n_failed > 0) {
            set_error(std::to_string(summary.n_failed) + " of " +
                      std::to_string(summary.n_samples) + " samples had a failed stage");
            return JOINTCQ_ERR_PARTIAL;
        }
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_synthesize(jointcq_context* ctx, const char* questions_jsonl,
                                  const char* output_jsonl) {
    if (ctx == nullptr || questions_jsonl == nullptr || output_jsonl == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        auto summary =
            jointcq::runner::synthesize_file(ctx->config, questions_jsonl, output_jsonl);
        if (summary.n_samples < summary.n_questions) {
            set_error(std::to_string(summary.n_questions - summary.n_samples) + " of " +
                      std::to_string(summary.n_questions) + " questions failed synthesis");
            return JOINTCQ_ERR_PARTIAL;
        }
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_filter(jointcq_context* ctx, const char* raw_samples_jsonl,
                              const char* output_dir) {
    if (ctx == nullptr || raw_samples_jsonl == nullptr || output_dir == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        auto summary = jointcq::runner::filter_file(ctx->config, raw_samples_jsonl, output_dir);
        if (!summary.quota_reached) {
            set_error("quota not reached: " + std::to_string(summary.n_accepted) + "/" +
                      std::to_string(ctx->config.filter_quota) + " after " +
                      std::to_string(summary.rounds_run) + " rounds");
            return JOINTCQ_ERR_QUOTA_NOT_REACHED;
        }
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_prepare(jointcq_context* ctx, const char* accepted_jsonl,
                               const char* output_dir) {
    if (ctx == nullptr || accepted_jsonl == nullptr || output_dir == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        jointcq::runner::prepare_file(ctx->config, accepted_jsonl, output_dir);
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_evaluate(jointcq_context* ctx, const char* reports_jsonl,
                                const char* gold_jsonl, const char* output_dir) {
    if (ctx == nullptr || reports_jsonl == nullptr || gold_jsonl == nullptr ||
        output_dir == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        auto summary =
            jointcq::runner::evaluate_file(ctx->config, reports_jsonl, gold_jsonl, output_dir);
        if (summary.n_missing_reports > 0) {
            set_error(std::to_string(summary.n_missing_reports) +
                      " gold samples had no report and were scored as failed");
            return JOINTCQ_ERR_PARTIAL;
        }
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_cosine_similarity(const double* u, const double* v, size_t n,
                                         double* out_similarity) {
    if (u == nullptr || v == nullptr || out_similarity == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        std::vector<double> uv(u, u + n);
        std::vector<double> vv(v, v + n);
        *out_similarity = jointcq::cosine_similarity(uv, vv);
        return JOINTCQ_OK;
    });
}

jointcq_status jointcq_parse_verdict(const char* raw, const char* language, int* out_label) {
    if (raw == nullptr || language == nullptr || out_label == nullptr) {
        set_error("null argument");
        return JOINTCQ_ERR_INVALID_ARG;
    }
    return guarded([&] {
        jointcq::Language lang = jointcq::language_from_string(language);
        jointcq::ParsedVerdict parsed = jointcq::parse_verdict(raw, lang);
        *out_label = static_cast<int>(parsed.label);
        return JOINTCQ_OK;
    });
}

} // extern "C"
