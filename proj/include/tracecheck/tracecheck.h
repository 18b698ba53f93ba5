/*
 * tracecheck C API.
 *
 * Every function returns a tc_status. On failure the message is available
 * from tc_last_error() until the next call on the same thread. Strings
 * returned through char** out-parameters are heap allocated and must be
 * released with tc_string_free(). Handles are released with their matching
 * *_free function; passing NULL to any *_free is a no-op.
 */
#ifndef TRACECHECK_H
#define TRACECHECK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TC_BUILDING_LIBRARY)
#    define TC_API __declspec(dllexport)
#  else
#    define TC_API __declspec(dllimport)
#  endif
#else
#  define TC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tc_status {
  TC_OK = 0,
  TC_ERR_PARSE = 1,
  TC_ERR_MODEL = 2,
  TC_ERR_TEMPLATE = 3,
  TC_ERR_STATE_EXPLOSION = 4,
  TC_ERR_INVALID_ARGUMENT = 5,
  TC_ERR_NOT_FOUND = 6,
  TC_ERR_WRONG_STATUS = 7,
  TC_ERR_IO = 8,
  TC_ERR_INTERNAL = 9
} tc_status;

typedef enum tc_property_type { TC_STRONG = 0, TC_WEAK = 1 } tc_property_type;
typedef enum tc_base_mode { TC_BASE_FAITHFUL = 0, TC_BASE_CORRECTED = 1 } tc_base_mode;
typedef enum tc_verdict { TC_CONFIRMED = 0, TC_REJECTED = 1 } tc_verdict;
typedef enum tc_liability_status {
  TC_STATUS_CREATED = 0,
  TC_STATUS_RESULT_SUBMITTED = 1,
  TC_STATUS_CONFIRMED = 2,
  TC_STATUS_REJECTED = 3
} tc_liability_status;

typedef struct tc_model tc_model;
typedef struct tc_graph tc_graph;
typedef struct tc_formula tc_formula;
typedef struct tc_log tc_log;
typedef struct tc_workspace tc_workspace;

TC_API const char* tc_version(void);
TC_API const char* tc_last_error(void);
TC_API const char* tc_status_name(tc_status status);
TC_API void tc_string_free(char* s);

/* Models (.gcm) */
TC_API tc_status tc_model_parse(const char* text, tc_model** out);
TC_API tc_status tc_model_print(const tc_model* model, char** out);
TC_API size_t tc_model_variable_count(const tc_model* model);
TC_API void tc_model_free(tc_model* model);

/* Template instantiation. settings_yaml and bindings_json may be NULL. The
 * rendered text is validated as a model before it is returned. */
TC_API tc_status tc_render_template(const char* template_text, const char* settings_yaml,
                                    const char* bindings_json, char** out_model_text);

/* State graphs. max_states == 0 selects the default budget (1,000,000). */
TC_API tc_status tc_graph_build(const tc_model* model, uint64_t max_states, tc_graph** out);
TC_API uint64_t tc_graph_state_count(const tc_graph* graph);
TC_API uint64_t tc_graph_edge_count(const tc_graph* graph);
TC_API void tc_graph_free(tc_graph* graph);

/* CTL formulas (.ctl) */
TC_API tc_status tc_formula_parse(const char* text, tc_formula** out);
TC_API tc_status tc_formula_print(const tc_formula* formula, char** out);
TC_API void tc_formula_free(tc_formula* formula);

/* Model checking: *holds is set to 1 when some initial state satisfies the
 * formula. On failure *diagnostic (optional) receives one line per initial
 * state. */
TC_API tc_status tc_check(const tc_graph* graph, const tc_formula* formula, int* holds, char** diagnostic);

/* Execution logs (.csv) and generated properties. *warning (optional)
 * receives an empty string or a warning about an unsatisfiable base case. */
TC_API tc_status tc_log_parse(const char* csv, tc_log** out);
TC_API size_t tc_log_row_count(const tc_log* log);
TC_API void tc_log_free(tc_log* log);
TC_API tc_status tc_property_generate(const tc_log* log, tc_property_type type, tc_base_mode base,
                                      tc_formula** out, char** warning);

/* Grid-town scenarios. include_unused_actions selects the unreduced model. */
TC_API tc_status tc_town_bindings(const char* town_json, const char* objective_json, int include_unused_actions,
                                  char** out_template, char** out_settings_yaml, char** out_bindings_json);
TC_API tc_status tc_town_model(const char* town_json, const char* objective_json, int include_unused_actions,
                               char** out_model_text);
/* fault may be NULL or "" for an honest run. *warnings (optional) receives
 * newline-separated simulator warnings. */
TC_API tc_status tc_town_simulate(const char* town_json, const char* objective_json, const char* fault,
                                  char** out_log_csv, char** warnings);

/* Workspace: ledger file + content store directory. */
TC_API tc_status tc_workspace_open(const char* ledger_path, const char* store_dir, tc_workspace** out);
TC_API void tc_workspace_free(tc_workspace* ws);

/* hash_out must hold 65 bytes (64 hex digits + NUL). */
TC_API tc_status tc_store_put(tc_workspace* ws, const void* data, size_t size, char* hash_out);
/* *out is NUL-terminated; *size excludes the terminator. */
TC_API tc_status tc_store_get(tc_workspace* ws, const char* hash, char** out, size_t* size);

typedef struct tc_liability_info {
  uint64_t id;
  tc_liability_status status;
  char model_hash[65];
  char objective_hash[65];
  char result_hash[65]; /* empty before a result is submitted */
} tc_liability_info;

TC_API tc_status tc_liability_create(tc_workspace* ws, const char* promisor, const char* promisee,
                                     const char* model_hash, const char* objective_hash, uint64_t* id_out);
TC_API tc_status tc_liability_get(tc_workspace* ws, uint64_t id, tc_liability_info* out);
TC_API uint64_t tc_liability_count(tc_workspace* ws);
TC_API tc_status tc_liability_submit(tc_workspace* ws, uint64_t id, const char* result_hash);

/* Validates one liability with a submitted result and records the verdict.
 * Malformed results produce TC_REJECTED, not an error status. *reason and
 * *detail are optional. */
TC_API tc_status tc_liability_validate(tc_workspace* ws, uint64_t id, tc_property_type type, tc_base_mode base,
                                       tc_verdict* verdict, char** reason, char** detail);

typedef void (*tc_verdict_callback)(uint64_t id, tc_verdict verdict, const char* reason, const char* detail,
                                    void* user);
typedef int (*tc_stop_callback)(void* user);

typedef struct tc_validator_options {
  tc_property_type type;
  tc_base_mode base;
  int watch;                    /* keep polling until should_stop returns nonzero */
  unsigned poll_interval_ms;    /* 0 selects 500 */
  tc_verdict_callback on_verdict; /* may be NULL */
  tc_stop_callback should_stop;   /* may be NULL */
  void* user;
} tc_validator_options;

TC_API tc_status tc_validator_run(tc_workspace* ws, const tc_validator_options* options, uint64_t* processed,
                                  uint64_t* rejected);

/* Re-derives every recorded verdict from the stored artifacts without
 * modifying the ledger. on_verdict (may be NULL) receives the re-derived
 * verdicts; *mismatches counts disagreements with the recorded ones. */
TC_API tc_status tc_replay(tc_workspace* ws, tc_property_type type, tc_base_mode base, tc_verdict_callback on_verdict,
                           void* user, uint64_t* checked, uint64_t* mismatches);

#ifdef __cplusplus
}
#endif

#endif /* TRACECHECK_H */
