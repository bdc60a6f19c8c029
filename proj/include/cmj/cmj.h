#ifndef CMJ_CMJ_H
#define CMJ_CMJ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CMJ_API __declspec(dllexport)
#else
#define CMJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmj_status {
  CMJ_OK = 0,
  CMJ_ERR_ARGUMENT = 1, /* bad parameter or law/config spec */
  CMJ_ERR_PARSE = 2,    /* malformed sticks or config text */
  CMJ_ERR_RANGE = 3,    /* index outside the data */
  CMJ_ERR_IO = 4,
  CMJ_ERR_INTERNAL = 5
} cmj_status;

typedef struct cmj_sticks cmj_sticks;
typedef struct cmj_forest cmj_forest;

/* Message for the last failing call on this thread; never NULL. */
CMJ_API const char* cmj_last_error(void);
CMJ_API const char* cmj_version(void);
/* Frees strings returned through char** out-parameters. */
CMJ_API void cmj_string_free(char* s);

CMJ_API cmj_status cmj_sticks_create(cmj_sticks** out);
/* JSON array of {"v", "births"} or one "v a1 a2 ..." line per stick. */
CMJ_API cmj_status cmj_sticks_parse(const char* text, cmj_sticks** out);
CMJ_API cmj_status cmj_sticks_sample(const char* law, size_t n, uint64_t seed, cmj_sticks** out);
CMJ_API cmj_status cmj_sticks_push(cmj_sticks* s, double v, const double* births, size_t count);
CMJ_API size_t cmj_sticks_size(const cmj_sticks* s);
CMJ_API cmj_status cmj_sticks_to_json(const cmj_sticks* s, char** out);
CMJ_API void cmj_sticks_free(cmj_sticks* s);

CMJ_API cmj_status cmj_forest_build(const cmj_sticks* s, cmj_forest** out);
CMJ_API size_t cmj_forest_size(const cmj_forest* f);
CMJ_API int cmj_forest_complete(const cmj_forest* f);
CMJ_API size_t cmj_forest_trees(const cmj_forest* f);
/* n may equal the size: the individual the next stick would become. */
CMJ_API cmj_status cmj_forest_height(const cmj_forest* f, size_t n, double* chrono, size_t* genealogical);
CMJ_API cmj_status cmj_forest_min_contour(const cmj_forest* f, size_t m, size_t n, double* out);
CMJ_API cmj_status cmj_forest_csv(const cmj_forest* f, char** nodes, char** contour, char** heights);
CMJ_API void cmj_forest_free(cmj_forest* f);

/* Reports are JSON; *ok is 1 iff every hard assertion held. */
CMJ_API cmj_status cmj_verify(const cmj_sticks* s, size_t pairs, uint64_t seed, char** report, int* ok);
CMJ_API cmj_status cmj_verify_random(size_t forests, size_t max_sticks, size_t pairs, uint64_t seed,
                                     unsigned workers, char** report, int* ok);
CMJ_API cmj_status cmj_oracle(const char* law, size_t draws, size_t tmax, double tv_tol, uint64_t seed,
                              char** report, int* ok);
/* replicas per law over the built-in mix of arithmetic and non-arithmetic laws. */
CMJ_API cmj_status cmj_couple(size_t replicas, double t, size_t m, uint64_t seed, unsigned workers,
                              char** report, int* ok);
/* config: key = value text. seed_override < 0 keeps the config's seed. */
CMJ_API cmj_status cmj_scale(const char* config, int64_t seed_override, unsigned workers, char** rows_csv,
                             char** extras_csv, char** summary, int* ok);

#ifdef __cplusplus
}
#endif

#endif
