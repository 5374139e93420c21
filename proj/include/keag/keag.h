/* Copyright 2026 The KEAG Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

/* C interface to the KEAG answer generator. Every function returns a
 * keag_status; on failure keag_last_error() describes the problem for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with keag_free_string(). */

#ifndef KEAG_KEAG_H_
#define KEAG_KEAG_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define KEAG_API __attribute__((visibility("default")))
#else
#define KEAG_API
#endif

/* Values double as process exit codes. */
typedef enum keag_status {
  KEAG_OK = 0,
  KEAG_ERR_INTERNAL = 1,
  KEAG_ERR_CONFIG = 2,
  KEAG_ERR_DATA = 3,
  KEAG_ERR_NUMERIC = 4
} keag_status;

typedef struct keag_config keag_config;
typedef struct keag_kb keag_kb;
typedef struct keag_model keag_model;

KEAG_API const char* keag_last_error(void);
KEAG_API void keag_free_string(char* s);

/* Configuration: defaults, then a file, then individual overrides. */
KEAG_API keag_status keag_config_create(keag_config** out);
KEAG_API keag_status keag_config_load_file(keag_config* config, const char* path);
KEAG_API keag_status keag_config_set(keag_config* config, const char* key, const char* value);
KEAG_API keag_status keag_config_to_string(const keag_config* config, char** out);
KEAG_API void keag_config_destroy(keag_config* config);

/* Commands. Summaries are JSON objects. */
KEAG_API keag_status keag_prepare(const keag_config* config, char** summary);
KEAG_API keag_status keag_extract_facts(const keag_config* config, char** summary);
KEAG_API keag_status keag_train(const keag_config* config, char** summary);
/* trace_text, when non-null, receives rendered source-trace tables. */
KEAG_API keag_status keag_generate(const keag_config* config, char** summary, char** trace_text);
KEAG_API keag_status keag_evaluate(const char* predictions, const char* references, char** report);
KEAG_API keag_status keag_synth(const char* task, size_t size, uint64_t seed, const char* out_dir,
                                char** summary);

/* Knowledge base handle: ranked related facts as a JSON array. */
KEAG_API keag_status keag_kb_open(const char* path, keag_kb** out);
KEAG_API keag_status keag_kb_extract(const keag_kb* kb, const char* question, const char* passage,
                                     size_t max_facts, char** facts_json);
KEAG_API void keag_kb_close(keag_kb* kb);

/* Model handle for answering single questions. */
KEAG_API keag_status keag_model_open(const keag_config* config, keag_model** out);
KEAG_API keag_status keag_model_generate(const keag_model* model, const char* question,
                                         const char* passage, char** answer_json,
                                         char** trace_text);
KEAG_API void keag_model_close(keag_model* model);

#ifdef __cplusplus
}
#endif

#endif /* KEAG_KEAG_H_ */
