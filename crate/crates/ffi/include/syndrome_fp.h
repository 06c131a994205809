#ifndef SYNDROME_FP_H
#define SYNDROME_FP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum SfpStatus {
  SFP_STATUS_OK = 0,
  SFP_STATUS_NULL_POINTER = 1,
  SFP_STATUS_INVALID_INPUT = 2,
  SFP_STATUS_MISSING_ARTIFACT = 3,
  SFP_STATUS_IO = 4,
  SFP_STATUS_SIMULATION = 5,
  SFP_STATUS_PANIC = 6,
} SfpStatus;

/*
 A generated fleet together with the scenario that produced it.
 */
typedef struct SfpFleet SfpFleet;

/*
 A trained backend classifier.
 */
typedef struct SfpModel SfpModel;

/*
 Syndrome records from a collection run or a shot log.
 */
typedef struct SfpRecords SfpRecords;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failing call on this thread, or an empty string.
 The pointer stays valid until the next failing call on this thread.
 */
const char *sfp_last_error(void);

/*
 Library version, static storage.
 */
const char *sfp_version(void);

/*
 Builds the fleet of a scenario. `scenario_json` may be null for the
 default scenario; `seed` replaces the scenario seed unless `keep_seed`
 is non-zero.

 # Safety
 `scenario_json` must be null or a valid C string; `out` must be writable.
 */
enum SfpStatus sfp_fleet_generate(const char *scenario_json,
                                  uint64_t seed,
                                  int32_t keep_seed,
                                  struct SfpFleet **out);

/*
 Number of backends in the fleet; 0 for a null handle.

 # Safety
 `fleet` must be null or a live handle.
 */
size_t sfp_fleet_len(const struct SfpFleet *fleet);

/*
 Writes one profile JSON per backend into `dir`.

 # Safety
 `fleet` must be a live handle and `dir` a valid C string.
 */
enum SfpStatus sfp_fleet_save(const struct SfpFleet *fleet, const char *dir);

/*
 # Safety
 `fleet` must be null or a handle not yet freed.
 */
void sfp_fleet_free(struct SfpFleet *fleet);

/*
 Runs the scenario's job schedule on the fleet.

 # Safety
 `fleet` must be a live handle; `out` must be writable.
 */
enum SfpStatus sfp_collect(const struct SfpFleet *fleet, struct SfpRecords **out);

/*
 Reads a JSON-Lines shot log (gzip if the name ends in `.gz`).

 # Safety
 `path` must be a valid C string; `out` must be writable.
 */
enum SfpStatus sfp_records_load(const char *path, struct SfpRecords **out);

/*
 # Safety
 `records` must be a live handle and `path` a valid C string.
 */
enum SfpStatus sfp_records_save(const struct SfpRecords *records, const char *path);

/*
 Number of shots; 0 for a null handle.

 # Safety
 `records` must be null or a live handle.
 */
size_t sfp_records_len(const struct SfpRecords *records);

/*
 # Safety
 `records` must be null or a handle not yet freed.
 */
void sfp_records_free(struct SfpRecords *records);

/*
 Trains a backend classifier on the training batches of `records`,
 using the fleet's scenario for encoding and hyperparameters.

 # Safety
 `fleet` and `records` must be live handles; `out` must be writable.
 */
enum SfpStatus sfp_train(const struct SfpFleet *fleet,
                         const struct SfpRecords *records,
                         struct SfpModel **out);

/*
 # Safety
 `path` must be a valid C string; `out` must be writable.
 */
enum SfpStatus sfp_model_load(const char *path, struct SfpModel **out);

/*
 # Safety
 `model` must be a live handle and `path` a valid C string.
 */
enum SfpStatus sfp_model_save(const struct SfpModel *model, const char *path);

/*
 Number of classes; 0 for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
size_t sfp_model_num_classes(const struct SfpModel *model);

/*
 Feature length the model expects; 0 for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
size_t sfp_model_input_dim(const struct SfpModel *model);

/*
 Label of class `index`, owned by the model; null if out of range.

 # Safety
 `model` must be null or a live handle.
 */
const char *sfp_model_class_name(const struct SfpModel *model, size_t index);

/*
 Predicts the class of one encoded feature vector of length `len`.

 # Safety
 `model` must be a live handle, `features` must point to `len` doubles,
 and `out_class` must be writable.
 */
enum SfpStatus sfp_model_predict(const struct SfpModel *model,
                                 const double *features,
                                 size_t len,
                                 size_t *out_class);

/*
 Checks each verify-batch job against its claimed backend. Writes the
 number of jobs and the number flagged as not matching their claim.

 # Safety
 All handles must be live; the output pointers must be writable.
 */
enum SfpStatus sfp_verify(const struct SfpFleet *fleet,
                          const struct SfpModel *model,
                          const struct SfpRecords *records,
                          size_t *out_jobs,
                          size_t *out_flagged);

/*
 # Safety
 `model` must be null or a handle not yet freed.
 */
void sfp_model_free(struct SfpModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYNDROME_FP_H */
