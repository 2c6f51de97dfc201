#ifndef REQONTO_H
#define REQONTO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum RqStatus {
  RQ_STATUS_OK = 0,
  RQ_STATUS_NULL_POINTER = 1,
  RQ_STATUS_INVALID_UTF8 = 2,
  RQ_STATUS_PARSE = 3,
  RQ_STATUS_VALIDATION = 4,
  RQ_STATUS_INTERNAL = 5,
} RqStatus;

/**
 * Serialization formats.
 */
typedef enum RqFormat {
  RQ_FORMAT_TURTLE = 0,
  RQ_FORMAT_RDF_XML = 1,
} RqFormat;

/**
 * An ontology: classes, properties and instances.
 */
typedef struct RqOntology RqOntology;

/**
 * A parsed XSD.
 */
typedef struct RqSchema RqSchema;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into the library.
 */
const char *rq_last_error_message(void);

/**
 * Free a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void rq_string_free(char *s);

/**
 * Parse an XSD document.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum RqStatus rq_schema_parse(const uint8_t *data, size_t len, struct RqSchema **out);

/**
 * Check the authoring rules. Writes the violations as a JSON array to
 * `out_json` and returns `RQ_STATUS_VALIDATION` when there are any.
 *
 * # Safety
 * `schema` must be a live handle; `out_json` must be writable.
 */
enum RqStatus rq_schema_check(const struct RqSchema *schema, char **out_json);

/**
 * # Safety
 * `schema` must come from [`rq_schema_parse`] and not be freed twice.
 */
void rq_schema_free(struct RqSchema *schema);

/**
 * Classes and properties generated from a schema.
 *
 * # Safety
 * `schema` must be a live handle, `base_iri` a NUL-terminated string and
 * `out` writable.
 */
enum RqStatus rq_ontology_from_schema(const struct RqSchema *schema,
                                      const char *base_iri,
                                      struct RqOntology **out);

/**
 * Add the instances of an XML document. The build report is written as
 * JSON to `out_report` when it is not NULL. On failure the ontology is
 * left as it was.
 *
 * # Safety
 * Handles must be live, `xml` must point to `len` readable bytes.
 */
enum RqStatus rq_ontology_populate(struct RqOntology *ontology,
                                   const struct RqSchema *schema,
                                   const uint8_t *xml,
                                   size_t len,
                                   char **out_report);

/**
 * # Safety
 * `ontology` must be a live handle; `out` must be writable.
 */
enum RqStatus rq_ontology_serialize(const struct RqOntology *ontology,
                                    enum RqFormat format,
                                    char **out);

/**
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum RqStatus rq_ontology_parse(const uint8_t *data,
                                size_t len,
                                enum RqFormat format,
                                struct RqOntology **out);

/**
 * Triple-set equality.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum RqStatus rq_ontology_equal(const struct RqOntology *a, const struct RqOntology *b, bool *out);

/**
 * # Safety
 * `ontology` must be a live handle; `out` must be writable.
 */
enum RqStatus rq_ontology_instance_count(const struct RqOntology *ontology, size_t *out);

/**
 * # Safety
 * `ontology` must come from this library and not be freed twice.
 */
void rq_ontology_free(struct RqOntology *ontology);

/**
 * Maximal cliques of a graph given as
 * `{"vertices": [...], "edges": [[a, b], ...]}`, returned as a JSON array
 * of vertex arrays, largest first.
 *
 * # Safety
 * `graph_json` must be a NUL-terminated string; `out` must be writable.
 */
enum RqStatus rq_maximal_cliques(const char *graph_json, char **out);

/**
 * Harmonic mean of precision and recall. `RQ_STATUS_VALIDATION` when either is
 * outside [0, 1] or both are zero.
 *
 * # Safety
 * `out` must be writable.
 */
enum RqStatus rq_f_score(double precision, double recall, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REQONTO_H */
