/* Public C interface to the photoacoustic simulation/reconstruction
 * pipeline. All functions are exception-safe across the boundary: failures
 * are reported through return codes / null handles plus a thread-local
 * message retrievable with vispat_last_message(). */
#ifndef VISPAT_H
#define VISPAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (also the CLI exit codes):
 *   0 success
 *   1 quality/threshold failure in strict mode
 *   2 usage or configuration error (bad JSON, missing files, bad shapes)
 *   3 numerical abort (instability, divergence) */
enum {
  VISPAT_OK = 0,
  VISPAT_QUALITY = 1,
  VISPAT_CONFIG = 2,
  VISPAT_NUMERICAL = 3
};

/* Runs one pipeline command: "phantom", "simulate", "adjoint-test",
 * "reconstruct" or "metrics". config_json is a JSON object merged over the
 * built-in defaults; the effective configuration is echoed to the output
 * directory. Returns a status code; the outcome summary (or error text) is
 * available from vispat_last_message(). */
int vispat_run(const char* command, const char* config_json);

/* Human-readable result of the most recent call on this thread. The pointer
 * stays valid until the next vispat_* call on the same thread. */
const char* vispat_last_message(void);

/* JSON array of the supported command names (static storage). */
const char* vispat_commands(void);

/* Opaque gridded float64 field, backed by the self-describing binary
 * container the pipeline reads and writes. */
typedef struct vispat_field vispat_field;

vispat_field* vispat_field_read(const char* path);
int vispat_field_write(const char* path, const vispat_field* f);
vispat_field* vispat_field_create(int rank, const int64_t* n,
                                  const double* dx, const char* tag);

int vispat_field_rank(const vispat_field* f);
int64_t vispat_field_size(const vispat_field* f, int axis);
double vispat_field_spacing(const vispat_field* f, int axis);
const char* vispat_field_tag(const vispat_field* f);
size_t vispat_field_count(const vispat_field* f);
/* Mutable row-major payload (last axis fastest), vispat_field_count doubles. */
double* vispat_field_data(vispat_field* f);

void vispat_field_free(vispat_field* f);

#ifdef __cplusplus
}
#endif

#endif /* VISPAT_H */
