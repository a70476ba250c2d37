/*
 * jointcq — claim-level factual hallucination detection pipeline and
 * training-data factory, exposed as a C shared-library API.
 *
 * All stateful operations go through an opaque context created from one JSON
 * configuration document (see README for the schema). Functions return
 * JOINTCQ_OK on success; on any other status jointcq_last_error() carries a
 * human-readable message for the calling thread.
 */
#ifndef JOINTCQ_H
#define JOINTCQ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jointcq_status {
    JOINTCQ_OK = 0,
    JOINTCQ_ERR_INVALID_ARG = 1,
    JOINTCQ_ERR_CONFIG = 2,
    JOINTCQ_ERR_IO = 3,
    JOINTCQ_ERR_TRANSPORT = 4,
    JOINTCQ_ERR_REPLAY_MISS = 5,
    JOINTCQ_ERR_PARSE = 6,
    JOINTCQ_ERR_QUOTA_NOT_REACHED = 7,
    /* Outputs were written but some samples failed a stage. */
    JOINTCQ_ERR_PARTIAL = 8,
    JOINTCQ_ERR_INTERNAL = 9
} jointcq_status;

typedef struct jointcq_context jointcq_context;

const char* jointcq_version(void);

/* Thread-local message describing the last failing call on this thread. */
const char* jointcq_last_error(void);

/* config_json: full resolved configuration as a JSON document. */
jointcq_status jointcq_context_create(const char* config_json, jointcq_context** out_ctx);
void jointcq_context_free(jointcq_context* ctx);

/* QA JSONL -> reports.jsonl + summary.json under output_dir. Returns
 * JOINTCQ_ERR_PARTIAL when some samples failed a stage (outputs complete). */
jointcq_status jointcq_detect(jointcq_context* ctx, const char* input_jsonl,
                              const char* output_dir);

/* Questions JSONL -> raw samples JSONL (answers, claims, queries). */
jointcq_status jointcq_synthesize(jointcq_context* ctx, const char* questions_jsonl,
                                  const char* output_jsonl);

/* Raw samples JSONL -> accepted.jsonl + audit.jsonl + filter_stats.json.
 * With filter.quota > 0 runs the resynthesis loop; returns
 * JOINTCQ_ERR_QUOTA_NOT_REACHED when rounds run out first. */
jointcq_status jointcq_filter(jointcq_context* ctx, const char* raw_samples_jsonl,
                              const char* output_dir);

/* Accepted samples JSONL -> train.jsonl + valid.jsonl + manifest.json. */
jointcq_status jointcq_prepare(jointcq_context* ctx, const char* accepted_jsonl,
                               const char* output_dir);

/* Reports JSONL + gold JSONL -> metrics.json + alignments.jsonl. */
jointcq_status jointcq_evaluate(jointcq_context* ctx, const char* reports_jsonl,
                                const char* gold_jsonl, const char* output_dir);

/* Stateless helpers. */

jointcq_status jointcq_cosine_similarity(const double* u, const double* v, size_t n,
                                         double* out_similarity);

/* Verdict labels: 0 = correct, 1 = hallucinated, 2 = unverifiable.
 * language: "en" or "zh". Total: every input maps to exactly one label. */
jointcq_status jointcq_parse_verdict(const char* raw, const char* language, int* out_label);

#ifdef __cplusplus
}
#endif

#endif /* JOINTCQ_H */
