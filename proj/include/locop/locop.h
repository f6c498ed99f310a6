#ifndef LOCOP_LOCOP_H
#define LOCOP_LOCOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(LOCOP_BUILDING_LIBRARY)
#define LOCOP_API __attribute__((visibility("default")))
#else
#define LOCOP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LOCOP_OK = 0,
  LOCOP_ERR_PRECONDITION = 2,
  LOCOP_ERR_NUMERICAL = 3,
  LOCOP_ERR_INTERNAL = 4
} locop_status;

typedef struct locop_matrix locop_matrix;
typedef struct locop_report locop_report;

LOCOP_API const char* locop_version(void);

/* Message of the last failed call on this thread, "" if none. */
LOCOP_API const char* locop_last_error(void);

LOCOP_API void locop_string_free(char* s);

LOCOP_API locop_status locop_matrix_load(const char* path, locop_matrix** out);
LOCOP_API locop_status locop_matrix_parse(const char* json_text, locop_matrix** out);
LOCOP_API void locop_matrix_free(locop_matrix* m);
LOCOP_API locop_status locop_matrix_shape(const locop_matrix* m, size_t* rows, size_t* cols);
LOCOP_API locop_status locop_matrix_schur_norm(const locop_matrix* m, double* out);
LOCOP_API locop_status locop_matrix_sjostrand_norm(const locop_matrix* m, double* out);

/* p = INFINITY selects the sup norm. seed is used only when has_seed != 0. */
LOCOP_API locop_status locop_matrix_lower_constant(const locop_matrix* m, double p, int has_seed, uint64_t seed,
                                                   double* value, int* certified);
LOCOP_API locop_status locop_matrix_upper_constant(const locop_matrix* m, double p, double* value, int* certified);

/* config_json holds {"analysis": name, ...}; relative paths resolve against base_dir. */
LOCOP_API locop_status locop_run(const char* config_json, const char* base_dir, locop_report** out);
LOCOP_API const char* locop_report_json(const locop_report* r);
/* NULL when the analysis has no CSV curve. */
LOCOP_API const char* locop_report_csv(const locop_report* r);
LOCOP_API void locop_report_free(locop_report* r);

/* Writes the generated corpus into out_dir; *manifest_json must be released with locop_string_free. */
LOCOP_API locop_status locop_generate(const char* request_json, const char* out_dir, char** manifest_json);

LOCOP_API locop_status locop_write_file(const char* path, const char* data, size_t size);

#ifdef __cplusplus
}
#endif

#endif
