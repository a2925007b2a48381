/* fklab shared-library interface.
 *
 * A run is created from a command name and a JSON configuration string,
 * executed, and queried for a JSON summary. Output files (CSV tables, JSON
 * reports) are written under the configured output directory during
 * execution.
 *
 * Commands: spectrum | resolvent | simulate | fixedpoint | sweep | verify.
 * Status codes mirror the CLI exit codes.
 */
#ifndef FKLAB_H
#define FKLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fklab_status {
  FKLAB_OK = 0,
  FKLAB_VERIFY_FAILED = 1,
  FKLAB_CONFIG_ERROR = 2,
  FKLAB_NUMERIC_ERROR = 3
} fklab_status;

typedef struct fklab_run fklab_run; /* opaque */

const char *fklab_version(void);

/* Parse and validate; on failure returns FKLAB_CONFIG_ERROR, *out_run is
 * NULL and fklab_last_error() carries the message. config_json may be NULL
 * or empty for an all-defaults run. */
fklab_status fklab_run_create(const char *command, const char *config_json,
                              fklab_run **out_run);

fklab_status fklab_run_execute(fklab_run *run);

/* JSON summary of an executed run; NULL before execution. The pointer stays
 * valid until fklab_run_destroy. */
const char *fklab_run_summary_json(const fklab_run *run);

/* Error message of the last failed call on this run; empty when none. */
const char *fklab_run_error(const fklab_run *run);

void fklab_run_destroy(fklab_run *run);

/* Thread-local message describing the most recent create failure. */
const char *fklab_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* FKLAB_H */
