#ifndef LSLAB_H
#define LSLAB_H

/* Generated from the lslab-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LsStatus {
  LsStatus_Ok = 0,
  /**
   * A pointer was null or an argument was out of range.
   */
  LsStatus_InvalidArgument = 1,
  /**
   * Input text (instance file, model file, distribution spec) was malformed.
   */
  LsStatus_ParseError = 2,
  LsStatus_IoError = 3,
  /**
   * Unexpected failure; a bug if it ever surfaces.
   */
  LsStatus_Internal = 4,
} LsStatus;

/**
 * Opaque CNF formula handle.
 */
typedef struct LsCnf LsCnf;

/**
 * Opaque weighted-graph handle.
 */
typedef struct LsGraph LsGraph;

/**
 * Opaque linear-policy handle.
 */
typedef struct LsModel LsModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ls_last_error(void);

/**
 * Library version as a static string.
 */
const char *ls_version(void);

/**
 * Draws a random graph. `family` is "er" or "ba", `weights` is "unit" or
 * "signed_unit". On success `*out` owns the new handle.
 */
enum LsStatus ls_graph_generate(const char *family,
                                size_t n,
                                double param,
                                const char *weights,
                                uint64_t seed,
                                struct LsGraph **out);

/**
 * Loads an edge-list instance file. On success `*out` owns the new handle.
 */
enum LsStatus ls_graph_load_gset_file(const char *path, struct LsGraph **out);

enum LsStatus ls_graph_save_gset_file(const struct LsGraph *g, const char *path);

/**
 * Vertex count, or 0 for a null handle.
 */
size_t ls_graph_vertex_count(const struct LsGraph *g);

/**
 * Edge count, or 0 for a null handle.
 */
size_t ls_graph_edge_count(const struct LsGraph *g);

/**
 * Releases a graph handle. Null is a no-op.
 */
void ls_graph_free(struct LsGraph *g);

/**
 * Exact optimum by enumeration. Rejects graphs with more than 24 vertices.
 */
enum LsStatus ls_maxcut_brute_force(const struct LsGraph *g, double *best_value);

/**
 * Greedy ascent from a seeded random start; writes the best cut found.
 */
enum LsStatus ls_maxcut_mca(const struct LsGraph *g, uint64_t seed, double *best_value);

/**
 * Tabu search from a seeded random start; writes the best cut found.
 */
enum LsStatus ls_maxcut_tabu(const struct LsGraph *g,
                             uint64_t tenure,
                             uint64_t max_steps,
                             bool aspiration,
                             uint64_t seed,
                             double *best_value);

/**
 * Loads a saved linear policy. On success `*out` owns the new handle.
 */
enum LsStatus ls_model_load_file(const char *path, struct LsModel **out);

enum LsStatus ls_model_save_file(const struct LsModel *m, const char *path);

/**
 * Releases a model handle. Null is a no-op.
 */
void ls_model_free(struct LsModel *m);

/**
 * Greedy policy rollouts on one graph; writes the best cut over
 * `episodes` episodes of `horizon_mult * n` flips each.
 */
enum LsStatus ls_softtabu_evaluate(const struct LsModel *m,
                                   const struct LsGraph *g,
                                   uint32_t episodes,
                                   uint32_t horizon_mult,
                                   uint64_t seed,
                                   double *best_value);

/**
 * Parses a DIMACS CNF file. On success `*out` owns the new handle.
 */
enum LsStatus ls_cnf_parse_dimacs_file(const char *path, struct LsCnf **out);

/**
 * Draws a formula from a distribution spec like "rand3:50:213" or
 * "color5:20:0.5". On success `*out` owns the new handle.
 */
enum LsStatus ls_cnf_generate(const char *dist, uint64_t seed, struct LsCnf **out);

/**
 * Variable count, or 0 for a null handle.
 */
size_t ls_cnf_var_count(const struct LsCnf *f);

/**
 * Clause count, or 0 for a null handle.
 */
size_t ls_cnf_clause_count(const struct LsCnf *f);

/**
 * Releases a formula handle. Null is a no-op.
 */
void ls_cnf_free(struct LsCnf *f);

/**
 * Complete satisfiability decision. `var_cap` bounds the accepted
 * variable count; pass 0 for the default cap of 200.
 */
enum LsStatus ls_dpll_sat(const struct LsCnf *f, size_t var_cap, bool *is_sat);

/**
 * One WalkSAT trial from a seeded random assignment.
 */
enum LsStatus ls_walksat(const struct LsCnf *f,
                         double p,
                         uint64_t max_steps,
                         bool freebie,
                         uint64_t seed,
                         bool *solved,
                         uint64_t *steps);

/**
 * One greedy policy trial on a SAT formula.
 */
enum LsStatus ls_softtabu_sat_solve(const struct LsModel *m,
                                    const struct LsCnf *f,
                                    uint64_t max_steps,
                                    uint64_t seed,
                                    bool *solved,
                                    uint64_t *steps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSLAB_H */
