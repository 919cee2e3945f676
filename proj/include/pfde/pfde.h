#ifndef PFDE_PFDE_H
#define PFDE_PFDE_H

/* C interface to the factorial-product equation toolkit.
 *
 * A session holds one run configuration. Settings use the long flag names of
 * the command-line tool ("eq", "bound", "workers", ...). Commands stream their
 * output one line at a time through a callback. Every function returning a
 * status leaves a message for pfde_last_error() on failure; the message is
 * per thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PFDE_API __declspec(dllexport)
#else
#define PFDE_API __attribute__((visibility("default")))
#endif

typedef enum pfde_status {
  PFDE_OK = 0,
  PFDE_ERR_CONFIG = 2,   /* bad input, options, DSL or hypotheses */
  PFDE_PARTIAL = 3,      /* a budget or interrupt stopped the run */
  PFDE_ERR_INTERNAL = 4  /* invariant violation */
} pfde_status;

typedef struct pfde_session pfde_session;

/* Receives one output line (no trailing newline). */
typedef void (*pfde_line_fn)(const char* line, size_t length, void* user);

PFDE_API const char* pfde_version(void);

PFDE_API pfde_session* pfde_session_create(void);
PFDE_API void pfde_session_destroy(pfde_session* session);

/* Applies one setting; repeatable keys ("bound", "triples", ...) accumulate. */
PFDE_API pfde_status pfde_session_set(pfde_session* session, const char* key, const char* value);

/* Applies every key = value line of a config file. */
PFDE_API pfde_status pfde_session_load_config(pfde_session* session, const char* path);

/* Runs "solve", "scan-brocard", "construct", "audit", "bhargava" or
 * "prune-test". Lines go to `sink` unless the session sets "out". */
PFDE_API pfde_status pfde_session_run(pfde_session* session, const char* command, pfde_line_fn sink,
                                      void* user);

/* Asks running commands to stop at the next chunk boundary. Async-signal-safe. */
PFDE_API void pfde_request_interrupt(void);
PFDE_API void pfde_clear_interrupt(void);

/* Message for the last failure on this thread, or "" if none. */
PFDE_API const char* pfde_last_error(void);

/* Helpers returning heap strings; release them with pfde_free. */

/* Canonical JSON description of an equation in the DSL. */
PFDE_API pfde_status pfde_parse_equation(const char* text, char** json_out);

/* n!_S in decimal for a set such as "Z", "AP(3,1)" or "{1,4,9,16}". */
PFDE_API pfde_status pfde_bhargava_factorial(const char* set, uint64_t n, char** decimal_out);

/* Product of the distinct primes dividing a decimal integer. */
PFDE_API pfde_status pfde_radical(const char* decimal, char** decimal_out);

/* v_p(n!) in decimal. */
PFDE_API pfde_status pfde_legendre_valuation(uint64_t n, uint64_t p, char** decimal_out);

PFDE_API void pfde_free(void* p);

#ifdef __cplusplus
}
#endif

#endif
