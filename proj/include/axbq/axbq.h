#ifndef AXBQ_AXBQ_H
#define AXBQ_AXBQ_H

/*
 * C interface to the axisymmetric Boussinesq workbench.
 *
 * Every function returning int returns an axbq_status. On failure the
 * message is available from axbq_last_error() on the calling thread until
 * the next failing call on that thread. Strings returned through char**
 * are owned by the caller and released with axbq_string_free().
 */

#include <stddef.h>

#if defined(_WIN32)
#define AXBQ_API __declspec(dllexport)
#else
#define AXBQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum axbq_status {
  AXBQ_OK = 0,
  AXBQ_INVALID_ARGUMENT = 1,
  AXBQ_INVALID_DIMENSION = 2,
  AXBQ_PARITY_MISMATCH = 3,
  AXBQ_SOLVER_NONCONVERGENCE = 4,
  AXBQ_GRID_TOO_COARSE = 5,
  AXBQ_NEAR_ONE_BRANCH = 6,
  AXBQ_WRONG_BRANCH = 7,
  AXBQ_BLOW_UP = 8,
  AXBQ_MISSING_SERIES = 9,
  AXBQ_CONFIG_MISMATCH = 10,
  AXBQ_PARSE_ERROR = 11,
  AXBQ_VALIDATION_ERROR = 12,
  AXBQ_IO_ERROR = 13,
  AXBQ_MISSING_RUN = 14,
  AXBQ_CHECK_FAILED = 15,
  AXBQ_INTERNAL = 99
} axbq_status;

/* Command exit statuses. */
#define AXBQ_EXIT_OK 0
#define AXBQ_EXIT_CHECK_FAILED 1
#define AXBQ_EXIT_ERROR 2

typedef struct axbq_config axbq_config;
typedef struct axbq_state axbq_state;

/* Receives one log line (without the newline). */
typedef void (*axbq_log_fn)(const char* line, void* user);

AXBQ_API const char* axbq_version(void);
AXBQ_API const char* axbq_last_error(void);
AXBQ_API const char* axbq_status_string(int status);
AXBQ_API void axbq_string_free(char* s);
/* Worker threads used for kappa sweeps (AXBQ_THREADS or the core count). */
AXBQ_API int axbq_thread_count(void);

/* ---- configuration ---- */

AXBQ_API int axbq_config_default(axbq_config** out);
/* line and column (1-based) are set on AXBQ_PARSE_ERROR; either may be NULL. */
AXBQ_API int axbq_config_parse(const char* text, axbq_config** out, int* line, int* column);
AXBQ_API int axbq_config_load(const char* path, axbq_config** out);
AXBQ_API int axbq_config_serialize(const axbq_config* cfg, char** out);
/* Dotted keys, e.g. "physics.kappa". The config is unchanged on error. */
AXBQ_API int axbq_config_set(axbq_config* cfg, const char* key, const char* value);
AXBQ_API int axbq_config_get(const axbq_config* cfg, const char* key, char** out);
AXBQ_API void axbq_config_free(axbq_config* cfg);

/* ---- commands ----
 * exit_status receives the command's exit status; it is AXBQ_EXIT_ERROR
 * whenever the return value is not AXBQ_OK. log may be NULL. */

AXBQ_API int axbq_cmd_run(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status);
AXBQ_API int axbq_cmd_verify(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status);
AXBQ_API int axbq_cmd_convergence(const axbq_config* cfg, axbq_log_fn log, void* user, int* exit_status);
AXBQ_API int axbq_cmd_plotdata(const char* run_dir, const char* out_dir, axbq_log_fn log, void* user,
                               int* files_written);

/* ---- simulation state ---- */

/* Initial state from the config's grid and init sections. */
AXBQ_API int axbq_state_create(const axbq_config* cfg, double kappa, axbq_state** out);
/* Advances by nsteps steps of the config's time settings. */
AXBQ_API int axbq_state_step(axbq_state* s, const axbq_config* cfg, int nsteps);
AXBQ_API int axbq_state_time(const axbq_state* s, double* t);
AXBQ_API int axbq_state_dims(const axbq_state* s, int* nr, int* nz);
/* name is one of rho, zeta, vr, vz, psi; out receives nr * nz values, row-major in r. */
AXBQ_API int axbq_state_field(const axbq_state* s, const char* name, double* out, size_t len);
AXBQ_API int axbq_state_save(const axbq_state* s, const char* path);
AXBQ_API int axbq_state_load(const char* path, axbq_state** out);
AXBQ_API void axbq_state_free(axbq_state* s);

#ifdef __cplusplus
}
#endif

#endif /* AXBQ_AXBQ_H */
