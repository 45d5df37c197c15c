#pragma once

/* C interface to the odometry library: opaque handles, integer error codes,
 * and plain-C data carriers. Every fallible call returns SPLIO_OK on success
 * or an error code; splio_last_error() describes the most recent failure on
 * the calling thread. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SPLIO_OK 0
#define SPLIO_ERR_INPUT 1     /* bad arguments, config, or input data */
#define SPLIO_ERR_ESTIMATOR 2 /* numerical failure inside the filter */

/* Message for the most recent failure on this thread; never NULL. */
const char* splio_last_error(void);

/* ---- configuration ----------------------------------------------------- */

typedef struct splio_config splio_config;

splio_config* splio_config_create(void); /* all defaults */
void splio_config_destroy(splio_config* cfg);

/* Merges a config file into cfg. */
int splio_config_load(splio_config* cfg, const char* path);
/* Applies one "section.key" = value assignment. */
int splio_config_set(splio_config* cfg, const char* key, const char* value);
/* Full config as a parseable file body; free with splio_string_free. */
char* splio_config_dump(const splio_config* cfg);
void splio_string_free(char* s);

/* ---- synthetic data ---------------------------------------------------- */

/* Generates a deterministic dataset per the [sim] section (plus lidar./imu.
 * noise levels and run.seed): one point log per entry of lidar_paths
 * (sensor 0 spinning, further sensors quasi-random, each with its configured
 * extrinsics), an inertial log if imu_path is non-NULL, and the ground-truth
 * trajectory if gt_path is non-NULL. */
int splio_simulate(const splio_config* cfg, const char* const* lidar_paths,
                   int n_lidar, const char* imu_path, const char* gt_path);

/* ---- odometry runs ----------------------------------------------------- */

typedef struct splio_result splio_result;

typedef struct splio_report {
  int n_batches;
  int n_points_in;   /* after range filtering */
  int n_points_used; /* after downsampling */
  int n_active;
  int n_gated;
  int n_no_assoc;
  int map_size;
  double max_abs_residual; /* m */
  double xi;               /* mean batch processing time / batch span */
  double mean_seconds;
  double p50_seconds;
  double p95_seconds;
  double max_seconds;
} splio_report;

/* Runs odometry over the given point logs (and inertial log for the
 * inertial modes; pass NULL otherwise). On success *out owns the result. */
int splio_run(const splio_config* cfg, const char* const* lidar_paths,
              int n_lidar, const char* imu_path, splio_result** out);
void splio_result_destroy(splio_result* res);

int splio_result_report(const splio_result* res, splio_report* out);
int splio_result_write_trajectory(const splio_result* res, const char* path);

/* ---- evaluation -------------------------------------------------------- */

/* APE RMSE (m) between two trajectory files, interpolating the estimate at
 * the ground-truth timestamps; align_se3 nonzero applies closed-form rigid
 * alignment first. */
int splio_evaluate_ape(const char* est_path, const char* gt_path, int align_se3,
                       double* ape_out);

#ifdef __cplusplus
}
#endif
