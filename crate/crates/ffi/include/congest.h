#ifndef CONGEST_H
#define CONGEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CongestStatus {
  CONGEST_STATUS_OK = 0,
  CONGEST_STATUS_NULL_POINTER = 1,
  CONGEST_STATUS_VALIDATION = 2,
  CONGEST_STATUS_SOLVER = 3,
  CONGEST_STATUS_IO = 4,
  CONGEST_STATUS_INVALID_INDEX = 5,
  CONGEST_STATUS_INVALID_UTF8 = 6,
  CONGEST_STATUS_PANIC = 7,
} CongestStatus;

/**
 * A validated game.
 */
typedef struct CongestGame CongestGame;

/**
 * A composite equilibrium of a [`CongestGame`].
 */
typedef struct CongestOutcome CongestOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *congest_last_error(void);

/**
 * Parses a game from TOML text in the CLI's game-file format.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CongestStatus congest_game_from_toml(const char *toml, struct CongestGame **out);

/**
 * Reads a TOML game file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CongestStatus congest_game_load(const char *path, struct CongestGame **out);

/**
 * Builds a game from two polynomial arc costs, given as ascending-degree
 * coefficients, a nonatomic mass and atomic weights. Costs are validated on
 * `[0, 2 M]`.
 *
 * # Safety
 * Each array must hold at least its stated number of elements and `out`
 * must be writable.
 */
enum CongestStatus congest_game_new(const double *arc_a,
                                    size_t arc_a_len,
                                    const double *arc_b,
                                    size_t arc_b_len,
                                    double nonatomic,
                                    const double *weights,
                                    size_t weights_len,
                                    struct CongestGame **out);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must come from this library and not have been freed.
 */
void congest_game_free(struct CongestGame *game);

/**
 * Number of atomic players in the game as given.
 *
 * # Safety
 * `game` must be a live handle and `out` writable.
 */
enum CongestStatus congest_game_player_count(const struct CongestGame *game, size_t *out);

/**
 * Computes the composite equilibrium.
 *
 * # Safety
 * `game` must be a live handle and `out` writable.
 */
enum CongestStatus congest_solve(const struct CongestGame *game, struct CongestOutcome **out);

/**
 * Releases an outcome. Null is ignored.
 *
 * # Safety
 * `outcome` must come from this library and not have been freed.
 */
void congest_outcome_free(struct CongestOutcome *outcome);

/**
 * Aggregate flow on each arc.
 *
 * # Safety
 * `outcome` must be a live handle and `flows` must hold two doubles.
 */
enum CongestStatus congest_outcome_aggregate(const struct CongestOutcome *outcome, double *flows);

/**
 * Per-unit cost of each arc.
 *
 * # Safety
 * `outcome` must be a live handle and `costs` must hold two doubles.
 */
enum CongestStatus congest_outcome_arc_costs(const struct CongestOutcome *outcome, double *costs);

/**
 * Social cost of the outcome.
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
enum CongestStatus congest_outcome_social_cost(const struct CongestOutcome *outcome, double *out);

/**
 * Flow of atomic player `player` on each arc, and that player's cost.
 *
 * # Safety
 * `outcome` must be a live handle, `flows` must hold two doubles and `cost`
 * must be writable.
 */
enum CongestStatus congest_outcome_player(const struct CongestOutcome *outcome,
                                          size_t player,
                                          double *flows,
                                          double *cost);

/**
 * Optimal single-atomic decentralization of `player`: the weight of the
 * one atomic deputy and the resulting cost.
 *
 * # Safety
 * `game` must be a live handle; `s` and `cost` must be writable.
 */
enum CongestStatus congest_optimal_strategy(const struct CongestGame *game,
                                            size_t player,
                                            double *s,
                                            double *cost);

/**
 * Stackelberg solution with `player` as leader: the leader's flow on each
 * arc and its cost.
 *
 * # Safety
 * `game` must be a live handle, `flows` must hold two doubles and `cost`
 * must be writable.
 */
enum CongestStatus congest_stackelberg(const struct CongestGame *game,
                                       size_t player,
                                       double *flows,
                                       double *cost);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONGEST_H */
