#ifndef ARCFILLET_H
#define ARCFILLET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AfStatus {
  AF_STATUS_OK = 0,
  AF_STATUS_NULL_POINTER = 1,
  AF_STATUS_INVALID_ARGUMENT = 2,
  AF_STATUS_PARSE = 3,
  AF_STATUS_PLACEMENT = 4,
  AF_STATUS_NO_PATH = 5,
  AF_STATUS_SMOOTHING = 6,
  AF_STATUS_IO = 7,
  AF_STATUS_PANIC = 8,
} AfStatus;

/**
 * Occupancy grid handle.
 */
typedef struct AfGrid AfGrid;

/**
 * Polyline path handle.
 */
typedef struct AfPath AfPath;

/**
 * Smoothed path handle.
 */
typedef struct AfSmoothed AfSmoothed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next `af_*` call on the same thread.
 */
const char *af_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void af_string_free(char *s);

/**
 * Loads an ascii-grid or PGM file. PGM maps get one cell per meter.
 */
enum AfStatus af_grid_load(const char *path, struct AfGrid **out);

/**
 * Parses a map from memory; the format is detected from the content.
 */
enum AfStatus af_grid_load_bytes(const uint8_t *data, size_t len, struct AfGrid **out);

/**
 * The bundled 52 × 41 m evaluation map.
 */
enum AfStatus af_grid_builtin_complex(struct AfGrid **out);

void af_grid_free(struct AfGrid *grid);

enum AfStatus af_grid_dimensions(const struct AfGrid *grid,
                                 size_t *width,
                                 size_t *height,
                                 double *resolution);

/**
 * New grid with obstacles grown by `radius` meters.
 */
enum AfStatus af_grid_inflate(const struct AfGrid *grid, double radius, struct AfGrid **out);

enum AfStatus af_grid_is_free(const struct AfGrid *grid, double x, double y, bool *out);

enum AfStatus af_grid_segment_collides(const struct AfGrid *grid,
                                       double x1,
                                       double y1,
                                       double x2,
                                       double y2,
                                       bool *out);

/**
 * Roadmap planning on `grid` (inflated internally by `inflation_radius`).
 */
enum AfStatus af_plan(const struct AfGrid *grid,
                      double start_x,
                      double start_y,
                      double goal_x,
                      double goal_y,
                      size_t nodes,
                      double connection_distance,
                      uint64_t seed,
                      double inflation_radius,
                      struct AfPath **out);

/**
 * Builds a polyline from `count` interleaved x, y pairs.
 */
enum AfStatus af_path_from_points(const double *xy, size_t count, struct AfPath **out);

void af_path_free(struct AfPath *path);

enum AfStatus af_path_node_count(const struct AfPath *path, size_t *out);

enum AfStatus af_path_node(const struct AfPath *path, size_t index, double *x, double *y);

enum AfStatus af_path_length(const struct AfPath *path, double *out);

/**
 * Path as `L` lines; release with `af_string_free`.
 */
enum AfStatus af_path_to_text(const struct AfPath *path, char **out);

/**
 * Fillets every corner. `grid` may be NULL; when given, arcs are checked
 * against it and violations are counted by `af_smoothed_violation_count`.
 */
enum AfStatus af_smooth(const struct AfPath *path,
                        const struct AfGrid *grid,
                        double straight_tolerance,
                        struct AfSmoothed **out);

void af_smoothed_free(struct AfSmoothed *s);

enum AfStatus af_smoothed_length(const struct AfSmoothed *s, double *out);

enum AfStatus af_smoothed_arc_count(const struct AfSmoothed *s, size_t *out);

enum AfStatus af_smoothed_violation_count(const struct AfSmoothed *s, size_t *out);

/**
 * Path as `L` and `A` lines; release with `af_string_free`.
 */
enum AfStatus af_smoothed_to_text(const struct AfSmoothed *s, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARCFILLET_H */
