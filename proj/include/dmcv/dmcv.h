/* Copyright 2026 The dmcv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the dmcv compiler and checker.
 *
 * A session holds one protocol. Load it, optionally adjust options, then
 * compile and check. Returned strings stay valid until the next call on the
 * same session that returns a string of the same kind, or until the session
 * is destroyed. Sessions are not thread-safe; distinct sessions are
 * independent.
 */

#ifndef DMCV_H
#define DMCV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DMCV_API __declspec(dllexport)
#else
#define DMCV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmcv_status {
    DMCV_OK = 0,
    DMCV_FORMULA_FALSE = 1, /* checked fine, some formula is false */
    DMCV_ERR_COMPILE = 2,   /* syntax, validation or translation error */
    DMCV_ERR_BUDGET = 3,    /* state budget exceeded */
    DMCV_ERR_IO = 4,
    DMCV_ERR_ARGUMENT = 5,
    DMCV_ERR_INTERNAL = 6,
    DMCV_ERR_STATE = 7 /* call out of order, e.g. check before load */
} dmcv_status;

typedef struct dmcv_session dmcv_session;

DMCV_API const char* dmcv_version(void);
DMCV_API const char* dmcv_status_name(dmcv_status status);

DMCV_API dmcv_status dmcv_session_create(dmcv_session** out);
DMCV_API void dmcv_session_destroy(dmcv_session* session);

/* Message of the last failing call, or "". */
DMCV_API const char* dmcv_last_error(const dmcv_session* session);

/* Loading discards earlier results; options are kept. */
DMCV_API dmcv_status dmcv_load_file(dmcv_session* session, const char* path);
DMCV_API dmcv_status dmcv_load_source(dmcv_session* session, const char* source, size_t length);

DMCV_API dmcv_status dmcv_set_max_states(dmcv_session* session, uint64_t max_states);
/* Shuffles exploration order; results do not depend on it. */
DMCV_API dmcv_status dmcv_set_seed(dmcv_session* session, uint64_t seed);
DMCV_API dmcv_status dmcv_set_crosscheck(dmcv_session* session, int enabled);
/* Replaces the declared state of a single-qubit input. `re` and `im` hold
 * `count` values; `im` may be NULL. */
DMCV_API dmcv_status dmcv_override_input(dmcv_session* session, const char* qubit, const double* re, const double* im,
                                         size_t count);

/* Parse, validate, explore and build the interpreted system. */
DMCV_API dmcv_status dmcv_compile(dmcv_session* session);
/* Compiles if needed, then crosschecks and checks every formula. Returns
 * DMCV_OK when all formulas hold and DMCV_FORMULA_FALSE otherwise. */
DMCV_API dmcv_status dmcv_check(dmcv_session* session);

DMCV_API size_t dmcv_formula_count(const dmcv_session* session);
/* 1 true, 0 false, -1 not checked or out of range. */
DMCV_API int dmcv_formula_verdict(const dmcv_session* session, size_t index);
DMCV_API const char* dmcv_formula_text(dmcv_session* session, size_t index);
/* 1 when every crosscheck part agreed, 0 on mismatch, -1 when not run. */
DMCV_API int dmcv_crosscheck_ok(const dmcv_session* session);

DMCV_API size_t dmcv_configuration_count(const dmcv_session* session);
DMCV_API size_t dmcv_reachable_state_count(const dmcv_session* session);
DMCV_API size_t dmcv_registry_size(const dmcv_session* session);

/* Outputs. Each compiles or checks as needed and returns NULL on failure. */
DMCV_API const char* dmcv_report_json(dmcv_session* session, int include_timing);
DMCV_API const char* dmcv_report_table(dmcv_session* session);
DMCV_API const char* dmcv_emit_ispl(dmcv_session* session, size_t max_domain);
DMCV_API const char* dmcv_registry_csv(dmcv_session* session);
DMCV_API const char* dmcv_graph_dot(dmcv_session* session, int epistemic);
DMCV_API const char* dmcv_dump_states(dmcv_session* session);
DMCV_API const char* dmcv_system_json(dmcv_session* session);

/* Status of the last output call. */
DMCV_API dmcv_status dmcv_last_status(const dmcv_session* session);

#ifdef __cplusplus
}
#endif

#endif /* DMCV_H */
