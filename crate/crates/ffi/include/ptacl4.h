#ifndef PTACL4_H
#define PTACL4_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PTACL4_BOT 0

#define PTACL4_DENY 1

#define PTACL4_ALLOW 2

#define PTACL4_TOP 3

#define PTACL4_BASIS_CONF_CYC 0

#define PTACL4_BASIS_TRANSPOSITIONS 1

#define PTACL4_RESOLVE_DENY_BY_DEFAULT 0

#define PTACL4_RESOLVE_ALLOW_BY_DEFAULT 1

#define PTACL4_RESOLVE_SAFE 2

typedef enum Ptacl4Status {
  PTACL4_STATUS_OK = 0,
  PTACL4_STATUS_NULL_POINTER = 1,
  PTACL4_STATUS_INVALID_UTF8 = 2,
  PTACL4_STATUS_PARSE_ERROR = 3,
  PTACL4_STATUS_EVAL_ERROR = 4,
  PTACL4_STATUS_INVALID_ARGUMENT = 5,
  PTACL4_STATUS_PANIC = 6,
} Ptacl4Status;

/**
 * A parsed policy.
 */
typedef struct Ptacl4Policy Ptacl4Policy;

/**
 * A parsed request.
 */
typedef struct Ptacl4Request Ptacl4Request;

/**
 * A parsed decision table.
 */
typedef struct Ptacl4Table Ptacl4Table;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failed call on this thread, or null. Valid
 * until the next call into the library on the same thread.
 */
const char *ptacl4_last_error(void);

/**
 * Releases a string returned by the library.
 */
void ptacl4_string_free(char *s);

enum Ptacl4Status ptacl4_policy_parse(const char *source, struct Ptacl4Policy **out);

void ptacl4_policy_free(struct Ptacl4Policy *policy);

/**
 * Canonical text of a policy; release with [`ptacl4_string_free`].
 */
enum Ptacl4Status ptacl4_policy_emit(const struct Ptacl4Policy *policy, char **out);

enum Ptacl4Status ptacl4_request_parse(const char *source, struct Ptacl4Request **out);

void ptacl4_request_free(struct Ptacl4Request *request);

enum Ptacl4Status ptacl4_table_parse(const char *source, struct Ptacl4Table **out);

void ptacl4_table_free(struct Ptacl4Table *table);

/**
 * Compiles a table into a policy over references named after its columns.
 */
enum Ptacl4Status ptacl4_table_compile(const struct Ptacl4Table *table,
                                       uint8_t basis,
                                       bool strict_basis,
                                       struct Ptacl4Policy **out);

/**
 * Strict evaluation. References resolve through the `len` name/decision
 * pairs, which may be null when `len` is 0.
 */
enum Ptacl4Status ptacl4_policy_eval(const struct Ptacl4Policy *policy,
                                     const struct Ptacl4Request *request,
                                     const char *const *names,
                                     const uint8_t *values,
                                     size_t len,
                                     uint8_t *out);

/**
 * Indeterminacy semantics; writes a non-empty decision-set mask.
 */
enum Ptacl4Status ptacl4_policy_eval_ind(const struct Ptacl4Policy *policy,
                                         const struct Ptacl4Request *request,
                                         const char *const *names,
                                         const uint8_t *values,
                                         size_t len,
                                         uint8_t *out_mask);

/**
 * Reduces a decision-set mask to deny or allow.
 */
enum Ptacl4Status ptacl4_resolve(uint8_t mask, uint8_t strategy, uint8_t *out);

/**
 * The XACML-style combining algorithm over `len` decisions; `decisions`
 * may be null when `len` is 0.
 */
enum Ptacl4Status ptacl4_combine_kand(const uint8_t *decisions, size_t len, uint8_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PTACL4_H */
