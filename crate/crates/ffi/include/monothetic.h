#ifndef MONOTHETIC_H
#define MONOTHETIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MonoStatus {
  MONO_STATUS_OK = 0,
  // Null pointer or malformed UTF-8.
  MONO_STATUS_INVALID_ARGUMENT = 1,
  // Rejected group, derivation or parameter.
  MONO_STATUS_INPUT_ERROR = 2,
  // The derivation has an invariant part and cannot be lifted.
  MONO_STATUS_OBSTRUCTED = 3,
  // Operation not available for this group.
  MONO_STATUS_UNSUPPORTED = 4,
  // Panic caught at the boundary.
  MONO_STATUS_INTERNAL = 5,
} MonoStatus;

typedef struct MonoDerivation MonoDerivation;

typedef struct MonoGroup MonoGroup;

typedef struct MonoLift MonoLift;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library on the same thread.
const char *mono_last_error(void);

// # Safety
// `s` must be null or come from this library.
void mono_string_free(char *s);

// Parses a group description such as
// `{"kind":"odometer","primes":[[2,"inf"]],"scale":[2,4,8]}`.
//
// # Safety
// `json` must be a nul-terminated string, `out` writable.
enum MonoStatus mono_group_from_json(const char *json, struct MonoGroup **out);

// # Safety
// `g` must be null or a live group handle.
void mono_group_free(struct MonoGroup *g);

// 1 for an odometer, 0 for a torus, -1 for null.
//
// # Safety
// `g` must be null or a live group handle.
int32_t mono_group_is_odometer(const struct MonoGroup *g);

// Canonical JSON of the group; release with [`mono_string_free`].
//
// # Safety
// `g` must be a live group handle, `out` writable.
enum MonoStatus mono_group_to_json(const struct MonoGroup *g, char **out);

// # Safety
// `json` must be a nul-terminated string, `out` writable.
enum MonoStatus mono_derivation_from_json(const char *json, struct MonoDerivation **out);

// # Safety
// `d` must be null or a live derivation handle.
void mono_derivation_free(struct MonoDerivation *d);

// HS sum of the boundary values off multiples of `modulus`.
//
// # Safety
// Handles must be live, `out` writable.
enum MonoStatus mono_hs_condition(const struct MonoGroup *g,
                                  const struct MonoDerivation *d,
                                  uint64_t modulus,
                                  double *out);

// Builds a lift of `d` whose closed-form defect is at most `target`.
//
// # Safety
// Handles must be live, `out` writable.
enum MonoStatus mono_lift_build(const struct MonoGroup *g,
                                const struct MonoDerivation *d,
                                double target,
                                struct MonoLift **out);

// # Safety
// `lift` must be null or a live lift handle.
void mono_lift_free(struct MonoLift *lift);

// Closed-form HS² defect of the lift on the shift generators.
//
// # Safety
// `lift` must be a live lift handle, `out` writable.
enum MonoStatus mono_lift_defect(const struct MonoLift *lift, double *out);

// Largest cutoff used by the lift. A verification truncation should be at
// least four times this.
//
// # Safety
// `lift` must be a live lift handle, `out` writable.
enum MonoStatus mono_lift_max_cutoff(const struct MonoLift *lift, uint64_t *out);

// JSON of the lifted derivation.
//
// # Safety
// `lift` must be a live lift handle, `out` writable.
enum MonoStatus mono_lift_to_json(const struct MonoLift *lift, char **out);

// Checks the closed forms against matrices truncated at `l` and writes the
// JSON report. `agreement` receives 1 when all of them match.
//
// # Safety
// Handles must be live, `report` and `agreement` writable.
enum MonoStatus mono_lift_verify(const struct MonoLift *lift,
                                 const struct MonoGroup *g,
                                 size_t l,
                                 char **report,
                                 int32_t *agreement);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONOTHETIC_H */
