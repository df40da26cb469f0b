/*
 * Copyright 2026 The cstarlogic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CSTARLOGIC_H_
#define CSTARLOGIC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CSL_BUILDING_LIBRARY)
#define CSL_API __attribute__((visibility("default")))
#else
#define CSL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csl_status {
  CSL_OK = 0,
  CSL_ERR_STRUCTURAL,
  CSL_ERR_PRECONDITION,
  CSL_ERR_DOMAIN,
  CSL_ERR_SORT,
  CSL_ERR_PARSE,
  CSL_ERR_MODULUS,
  CSL_ERR_BUDGET,
  CSL_ERR_MISSING_WITNESS,
  CSL_ERR_GAP,
  CSL_ERR_UNKNOWN_NAME,
  CSL_ERR_IO,
  CSL_ERR_INTERNAL,
  CSL_ERR_ARGUMENT /* null pointer or index out of range */
} csl_status;

typedef struct csl_sentence csl_sentence;
typedef struct csl_report csl_report;

typedef struct csl_config {
  int restarts;
  int iterations;
  double step;
  double decay;
  double tolerance;
  uint64_t seed;
  int workers;
} csl_config;

typedef struct csl_record_info {
  const char* sentence;
  const char* signature; /* "2,2,1" */
  double value;
  const char* direction; /* certified-lower, certified-upper, heuristic, exact */
  uint64_t witness_digest;
  uint64_t samples;
  double wall_time;
  int cached;
} csl_record_info;

typedef struct csl_separation_info {
  const char* sentence;
  double value_a;
  double value_b;
  const char* direction_a;
  const char* direction_b;
  int evidence_only;
  const char* caveat;
} csl_separation_info;

typedef struct csl_probe_info {
  const char* name;
  const char* signature;
  size_t points;
  const double* deltas;
  const double* eps;
  double residual;
  double constant;
} csl_probe_info;

/* Strings returned through char** are owned by the caller: csl_string_free. */
CSL_API const char* csl_version(void);
CSL_API const char* csl_status_name(csl_status s);
/* Message of the last failed call on this thread. */
CSL_API const char* csl_last_error(void);
CSL_API void csl_string_free(char* s);
CSL_API void csl_config_default(csl_config* cfg);

/* Canonical "n1,n2,..." form; parse error names the bad token. */
CSL_API csl_status csl_signature_normalize(const char* text, char** out);

CSL_API csl_status csl_sentence_from_catalog(const char* ref, csl_sentence** out);
CSL_API csl_status csl_sentence_from_file(const char* path, csl_sentence** out);
CSL_API csl_status csl_sentence_parse(const char* name, const char* text, csl_sentence** out);
CSL_API csl_status csl_sentence_print(const csl_sentence* s, char** out);
CSL_API void csl_sentence_free(csl_sentence* s);

CSL_API csl_status csl_catalog_json(char** out);
/* Comma-separated entries of the default separation battery. */
CSL_API csl_status csl_default_battery(char** out);

/* cache_dir may be NULL or empty (no cache). */
CSL_API csl_status csl_battery(const csl_sentence* const* sentences, size_t n_sentences, const char* const* signatures,
                               size_t n_signatures, const csl_config* cfg, const char* cache_dir, csl_report** out);
/* battery NULL: the default separation battery. */
CSL_API csl_status csl_separate(const char* a, const char* b, double threshold, const csl_config* cfg,
                                const char* cache_dir, const char* const* battery, size_t n_battery,
                                csl_report** out);
CSL_API csl_status csl_probe(const char* name, const char* signature, const double* deltas, size_t n_deltas,
                             int samples, uint64_t seed, int workers, csl_report** out);

CSL_API csl_status csl_report_load(const char* json, csl_report** out);
/* timing = 0 gives the deterministic body. */
CSL_API csl_status csl_report_json(const csl_report* r, int timing, char** out);
CSL_API size_t csl_report_record_count(const csl_report* r);
CSL_API csl_status csl_report_record(const csl_report* r, size_t i, csl_record_info* out);
/* -1 when the report has no separation section. */
CSL_API long csl_report_separation_count(const csl_report* r);
CSL_API csl_status csl_report_separation(const csl_report* r, size_t i, csl_separation_info* out);
CSL_API size_t csl_report_probe_count(const csl_report* r);
CSL_API csl_status csl_report_probe(const csl_report* r, size_t i, csl_probe_info* out);
/* Replays every record at its witnesses; *failures counts digest or value mismatches. */
CSL_API csl_status csl_report_verify(const csl_report* r, size_t* failures);
CSL_API void csl_report_free(csl_report* r);

/* Upper bound for R_n of the tuple in tuple_json; result as JSON. */
CSL_API csl_status csl_cpfactor(const char* tuple_json, int n, const csl_config* cfg, char** out);

#ifdef __cplusplus
}
#endif

#endif /* CSTARLOGIC_H_ */
