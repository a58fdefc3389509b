#ifndef CTDISTILL_H
#define CTDISTILL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CtdStatus {
  CTD_STATUS_OK = 0,
  CTD_STATUS_NULL_POINTER = 1,
  CTD_STATUS_INVALID_UTF8 = 2,
  CTD_STATUS_IO = 3,
  CTD_STATUS_PARSE = 4,
  CTD_STATUS_SCHEMA = 5,
  CTD_STATUS_ARGUMENT = 6,
  CTD_STATUS_CAP_EXCEEDED = 7,
  CTD_STATUS_VERSION = 8,
  CTD_STATUS_CONFIG = 9,
  CTD_STATUS_OTHER = 10,
  CTD_STATUS_PANIC = 11,
} CtdStatus;

/**
 * A loaded graph dataset.
 */
typedef struct CtdDataset CtdDataset;

/**
 * A distilled dataset.
 */
typedef struct CtdDistilled CtdDistilled;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Owned by the
 * library; valid until the next failing call.
 */
const char *ctd_last_error(void);

/**
 * Loads a JSONL file or TU directory.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CtdStatus ctd_dataset_load(const char *path_, struct CtdDataset **out_);

/**
 * Assigns a seeded 80/10/10 train/val/test split in place.
 *
 * # Safety
 * `ds` must be a live handle from [`ctd_dataset_load`].
 */
enum CtdStatus ctd_dataset_split(struct CtdDataset *ds, uint64_t seed);

/**
 * Number of graphs, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
size_t ctd_dataset_len(const struct CtdDataset *ds);

/**
 * Number of classes, or 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
size_t ctd_dataset_num_classes(const struct CtdDataset *ds);

/**
 * # Safety
 * `ds` must be NULL or a handle not yet freed.
 */
void ctd_dataset_free(struct CtdDataset *ds);

/**
 * Distills `ds` with `hops` message-passing hops and one support
 * threshold per class (`n_thetas` values, or a single shared one).
 * `max_itemsets` of 0 selects the default cap. Uses the train part when
 * the dataset is split.
 *
 * # Safety
 * `thetas` must point to `n_thetas` doubles; `out` must be writable.
 */
enum CtdStatus ctd_distill(const struct CtdDataset *ds,
                           size_t hops,
                           const double *thetas,
                           size_t n_thetas,
                           size_t max_itemsets,
                           struct CtdDistilled **out_);

/**
 * Reads a distilled file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CtdStatus ctd_distilled_load(const char *path_, struct CtdDistilled **out_);

/**
 * Writes a distilled file; stores its size in `bytes` when non-NULL.
 *
 * # Safety
 * `dd` must be a live handle; `path` a NUL-terminated string.
 */
enum CtdStatus ctd_distilled_save(const struct CtdDistilled *dd, const char *path_, size_t *bytes);

/**
 * Number of unique computation trees, or 0 for NULL.
 *
 * # Safety
 * `dd` must be NULL or a live handle.
 */
size_t ctd_distilled_num_trees(const struct CtdDistilled *dd);

/**
 * Number of itemsets kept for `class`, or 0 when out of range.
 *
 * # Safety
 * `dd` must be NULL or a live handle.
 */
size_t ctd_distilled_num_itemsets(const struct CtdDistilled *dd, size_t class_);

/**
 * # Safety
 * `dd` must be NULL or a handle not yet freed.
 */
void ctd_distilled_free(struct CtdDistilled *dd);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTDISTILL_H */
