/* C ABI for the ccdp conversation-linking library. */

#ifndef CCDP_H
#define CCDP_H

/* Generated by cbindgen from crates/ffi; edit the Rust source, then regenerate with `cbindgen --crate ccdp-ffi --output include/ccdp.h`. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes shared with the C header. Values are part of the ABI; the
 variant names render as `CCDP_OK`, `CCDP_PARSE`, ... in C.
 */
typedef enum ccdp_status_t {
  CCDP_OK = 0,
  /*
   A required pointer was NULL or an argument was out of range.
   */
  CCDP_INVALID_ARGUMENT = 1,
  /*
   The input could not be parsed or validated.
   */
  CCDP_PARSE = 2,
  /*
   A message id was not present in the corpus.
   */
  CCDP_UNKNOWN_MESSAGE = 3,
  /*
   Unexpected internal failure (including caught panics).
   */
  CCDP_INTERNAL = 4,
} ccdp_status_t;

/*
 Opaque handle over an immutable [`Corpus`].
 */
typedef struct ccdp_corpus_t ccdp_corpus_t;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static string; never freed by the caller.
 */
const char *ccdp_version(void);

/*
 Message of the last failure on this thread ("" if none). Borrowed;
 valid until the next failing call on the same thread.
 */
const char *ccdp_last_error(void);

/*
 Load a corpus from a JSON file. On success writes a handle that must be
 released with `ccdp_corpus_free`.

 # Safety
 `path` must be a valid NUL-terminated string; `out` must be a valid
 pointer.
 */
enum ccdp_status_t ccdp_corpus_load_json(const char *path, struct ccdp_corpus_t **out);

/*
 Parse a corpus from an in-memory JSON document.

 # Safety
 `json` must be a valid NUL-terminated string; `out` must be a valid
 pointer.
 */
enum ccdp_status_t ccdp_corpus_from_json(const char *json, struct ccdp_corpus_t **out);

/*
 Number of messages in the corpus; 0 when `corpus` is NULL.

 # Safety
 `corpus` must be NULL or a handle from a `ccdp_corpus_*` constructor.
 */
size_t ccdp_corpus_len(const struct ccdp_corpus_t *corpus);

/*
 Release a corpus handle. NULL is a no-op.

 # Safety
 `corpus` must be NULL or an unreleased handle from a constructor.
 */
void ccdp_corpus_free(struct ccdp_corpus_t *corpus);

/*
 Release a string previously returned through an out-pointer. NULL is a
 no-op.

 # Safety
 `s` must be NULL or a string obtained from this library.
 */
void ccdp_string_free(char *s);

/*
 Header-based threads as a JSON array of `{ect_id, message_ids}`.

 # Safety
 `corpus` must be a live handle; `out_json` must be a valid pointer.
 */
enum ccdp_status_t ccdp_threads_json(const struct ccdp_corpus_t *corpus, char **out_json);

/*
 Run threading + linking with the default configuration at `threshold`
 and return the collaborative conversations as a JSON array of
 `{ccdp_id, ect_ids, links}`.

 # Safety
 `corpus` must be a live handle; `out_json` must be a valid pointer.
 */
enum ccdp_status_t ccdp_pipeline_json(const struct ccdp_corpus_t *corpus,
                                      double threshold,
                                      char **out_json);

/*
 Global proximity of two messages under the default configuration.

 # Safety
 `corpus` must be a live handle; `msg_a`/`msg_b` must be valid
 NUL-terminated strings; `out_gp` must be a valid pointer.
 */
enum ccdp_status_t ccdp_global_proximity(const struct ccdp_corpus_t *corpus,
                                         const char *msg_a,
                                         const char *msg_b,
                                         double *out_gp);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCDP_H */
