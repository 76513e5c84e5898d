#ifndef WAYPATH_H
#define WAYPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpDirection {
  WP_DIRECTION_STRAIGHT = 0,
  WP_DIRECTION_LEFT = 1,
  WP_DIRECTION_RIGHT = 2,
} WpDirection;

typedef enum WpMessageKind {
  WP_MESSAGE_KIND_THETA = 0,
  WP_MESSAGE_KIND_RANGE = 1,
  WP_MESSAGE_KIND_TARGET_FOUND = 2,
  WP_MESSAGE_KIND_LANE_LOST = 3,
  WP_MESSAGE_KIND_DONE = 4,
  WP_MESSAGE_KIND_ERROR = 5,
} WpMessageKind;

typedef enum WpOutcome {
  WP_OUTCOME_DONE = 0,
  WP_OUTCOME_TRAPPED = 1,
  WP_OUTCOME_TIMEOUT = 2,
} WpOutcome;

typedef enum WpPhase {
  WP_PHASE_TURNING_TO_TARGET = 0,
  WP_PHASE_DRIVING_STRAIGHT = 1,
  WP_PHASE_AVOIDING = 2,
  WP_PHASE_DONE = 3,
} WpPhase;

typedef enum WpStatus {
  WP_STATUS_OK = 0,
  WP_STATUS_NULL_ARGUMENT = 1,
  WP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input text or file could not be parsed.
   */
  WP_STATUS_PARSE = 3,
  WP_STATUS_NOT_FOUND = 4,
  WP_STATUS_IO = 5,
  /**
   * Geometry undefined for the given points.
   */
  WP_STATUS_DEGENERATE = 6,
  WP_STATUS_UNREACHABLE = 7,
  /**
   * Output buffer too small; the needed size is reported.
   */
  WP_STATUS_BUFFER_TOO_SMALL = 8,
  WP_STATUS_PROTOCOL = 9,
  /**
   * The operation failed for a reason not covered above.
   */
  WP_STATUS_FAILED = 10,
  WP_STATUS_PANIC = 11,
} WpStatus;

/**
 * Opaque occupancy grid handle.
 */
typedef struct WpGrid WpGrid;

/**
 * Opaque mission report handle.
 */
typedef struct WpMission WpMission;

/**
 * Opaque scenario handle.
 */
typedef struct WpScenario WpScenario;

/**
 * One trajectory sample.
 */
typedef struct WpSample {
  double t_s;
  double x_cm;
  double y_cm;
  double heading_deg;
  enum WpPhase phase;
} WpSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated). An empty string means the last call succeeded.
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `written` may be null.
 */
enum WpStatus wp_last_error(char *buf, size_t len, size_t *written);

/**
 * Steering angle from one midline, in degrees; positive turns right.
 *
 * # Safety
 * `theta_deg` must be a valid pointer.
 */
enum WpStatus wp_theta_single(double top_h,
                              double top_v,
                              double bottom_h,
                              double bottom_v,
                              double *theta_deg);

/**
 * Steering angle from the previous midline and the current top endpoint.
 *
 * # Safety
 * `theta_deg` must be a valid pointer.
 */
enum WpStatus wp_theta_multi(double prev_top_h,
                             double prev_top_v,
                             double prev_bottom_h,
                             double prev_bottom_v,
                             double curr_top_h,
                             double curr_top_v,
                             double *theta_deg);

/**
 * Turn-in-place command for a steering angle at the default turn rate.
 *
 * # Safety
 * `direction` and `duration_s` must be valid pointers.
 */
enum WpStatus wp_steer(double theta_deg, enum WpDirection *direction, double *duration_s);

/**
 * Creates an empty grid.
 *
 * # Safety
 * `grid` must be a valid pointer; the handle it receives is freed with
 * [`wp_grid_free`].
 */
enum WpStatus wp_grid_new(size_t cols, size_t rows, double cell_size_cm, struct WpGrid **grid);

/**
 * Parses the text grid format (header `cols rows cell_size`, then rows of
 * `.` and `#`).
 *
 * # Safety
 * `source` must be a NUL-terminated string and `grid` a valid pointer.
 */
enum WpStatus wp_grid_parse(const char *source, struct WpGrid **grid);

/**
 * # Safety
 * `grid` must be a live handle from this library.
 */
enum WpStatus wp_grid_set_blocked(struct WpGrid *grid, size_t col, size_t row, bool blocked);

/**
 * Shortest 8-connected path cost in cm and the operation count.
 *
 * # Safety
 * `grid` must be a live handle; `cost_cm` and `ops` must be valid pointers.
 */
enum WpStatus wp_grid_dijkstra(const struct WpGrid *grid,
                               size_t source_col,
                               size_t source_row,
                               size_t goal_col,
                               size_t goal_row,
                               double *cost_cm,
                               uint64_t *ops);

/**
 * # Safety
 * `grid` must be null or a handle not yet freed.
 */
void wp_grid_free(struct WpGrid *grid);

/**
 * Encodes one wire line, including the trailing newline. `value` is used by
 * THETA and RANGE, `error_text` by ERROR (may be null otherwise).
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `error_text` must be null or a
 * NUL-terminated string; `written` may be null.
 */
enum WpStatus wp_wire_encode(enum WpMessageKind kind,
                             double value,
                             const char *error_text,
                             char *buf,
                             size_t len,
                             size_t *written);

/**
 * Decodes one wire line. `value` receives the THETA or RANGE payload (0
 * otherwise). For ERROR the text is copied into `error_buf` when it is not
 * null.
 *
 * # Safety
 * `line` must be a NUL-terminated string; `kind` and `value` valid pointers;
 * `error_buf` null or `error_len` writable bytes.
 */
enum WpStatus wp_wire_decode(const char *line,
                             enum WpMessageKind *kind,
                             double *value,
                             char *error_buf,
                             size_t error_len);

/**
 * Loads a scenario JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `scenario` a valid pointer.
 */
enum WpStatus wp_scenario_load(const char *path, struct WpScenario **scenario);

/**
 * Parses a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `scenario` a valid pointer.
 */
enum WpStatus wp_scenario_from_json(const char *json, struct WpScenario **scenario);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void wp_scenario_free(struct WpScenario *scenario);

/**
 * Runs a full simulated mission. Trapped and timed-out missions still
 * succeed here; check [`wp_mission_outcome`].
 *
 * # Safety
 * `scenario` must be a live handle and `mission` a valid pointer.
 */
enum WpStatus wp_mission_run(const struct WpScenario *scenario, struct WpMission **mission);

/**
 * Outcome, elapsed simulated seconds and driven path length in cm.
 *
 * # Safety
 * `mission` must be a live handle; the out pointers may be null.
 */
enum WpStatus wp_mission_summary(const struct WpMission *mission,
                                 enum WpOutcome *outcome,
                                 double *elapsed_s,
                                 double *path_length_cm);

/**
 * Convenience accessor for the outcome alone.
 *
 * # Safety
 * `mission` must be a live handle and `outcome` a valid pointer.
 */
enum WpStatus wp_mission_outcome(const struct WpMission *mission, enum WpOutcome *outcome);

/**
 * Number of trajectory samples.
 *
 * # Safety
 * `mission` must be a live handle and `count` a valid pointer.
 */
enum WpStatus wp_mission_sample_count(const struct WpMission *mission, size_t *count);

/**
 * # Safety
 * `mission` must be a live handle and `sample` a valid pointer.
 */
enum WpStatus wp_mission_sample(const struct WpMission *mission,
                                size_t index,
                                struct WpSample *sample);

/**
 * # Safety
 * `mission` must be null or a handle not yet freed.
 */
void wp_mission_free(struct WpMission *mission);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAYPATH_H */
